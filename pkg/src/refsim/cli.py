"""Command-line front end.

Exit codes: 0 success, 1 parse or validation error, 2 policy runtime error.
Diagnostics go to stderr; summaries and "OK" go to stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import RunOptions, load_manager
from .errors import PolicyError, RefsimError, SpecError
from .gentrace import generate_text
from .manager import PolicyManager
from .platform import load_platform
from .policies import POLICY_TYPES
from .simulator import Simulator
from .trace import check_trace, load_trace

EXIT_OK, EXIT_INPUT, EXIT_POLICY = 0, 1, 2

log = logging.getLogger("refsim")


class InputError(Exception):
    pass


def _read(path: str | None, what: str) -> str:
    if path is None:
        raise InputError(f"--{what} is required")
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _ticks(ms: float, tick_ms: float, what: str) -> None:
    ratio = ms / tick_ms
    if ms <= 0 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
        raise InputError(f"{what} {ms:g} ms is not a positive multiple of the {tick_ms:g} ms tick")


def cmd_run(args) -> int:
    _ticks(args.duration_ms, args.tick_ms, "--duration-ms")
    info = load_platform(_read(args.platform, "platform"))
    trace = load_trace(_read(args.trace, "trace"), info)
    if args.manager is not None:
        mgr, opts = load_manager(_read(args.manager, "manager"), Path(args.manager).parent)
    else:
        mgr, opts = PolicyManager(), RunOptions()
    sim = Simulator(info, trace, mgr, tick=args.tick_ms / 1000,
                    migration_penalty=opts.migration_penalty, report_period=opts.report_period)
    report = sim.run(args.duration_ms / 1000)
    out = args.out or f"report.{args.format}"
    try:
        report.write(out, args.format)
    except OSError as exc:
        raise InputError(f"cannot write report {out}: {exc.strerror}") from None
    print(report.summary())
    print(f"report: {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    violations: list[str] = []
    info = None
    if args.platform is not None:
        try:
            info = load_platform(_read(args.platform, "platform"))
        except RefsimError as exc:
            violations.append(f"{args.platform}: {exc}")
    if args.trace is not None:
        trace, found = check_trace(_read(args.trace, "trace"), info)
        violations.extend(f"{args.trace}: {v}" for v in found)
        if trace is not None and args.tick_ms is not None and trace.sample_ms != args.tick_ms:
            violations.append(f"{args.trace}: sample_ms {trace.sample_ms:g} differs from "
                              f"the {args.tick_ms:g} ms tick")
    if args.manager is not None:
        try:
            mgr, _ = load_manager(_read(args.manager, "manager"), Path(args.manager).parent)
            mgr.check()
        except RefsimError as exc:
            violations.append(f"{args.manager}: {exc}")
    if args.platform is None and args.trace is None and args.manager is None:
        raise InputError("nothing to validate: pass --platform, --trace and/or --manager")
    for v in violations:
        print(v, file=sys.stderr)
    if violations:
        return EXIT_INPUT
    print("OK")
    return EXIT_OK


def cmd_gen_trace(args) -> int:
    text = generate_text(_read(args.spec, "spec"), args.seed)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_list_policies(args) -> int:
    for name, cls in POLICY_TYPES.items():
        doc = (cls.__doc__ or "").strip().splitlines()
        print(f"{name:<16} period={cls.period * 1e3:g} ms  {doc[0] if doc else ''}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="refsim", description="Reflective resource-management simulator")
    p.add_argument("--log-level", default="WARNING",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a workload under a policy manager")
    r.add_argument("--platform", required=True)
    r.add_argument("--trace", required=True)
    r.add_argument("--manager")
    r.add_argument("--duration-ms", type=float, required=True)
    r.add_argument("--tick-ms", type=float, default=10.0)
    r.add_argument("--out")
    r.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check inputs without simulating")
    v.add_argument("--platform")
    v.add_argument("--trace")
    v.add_argument("--manager")
    v.add_argument("--tick-ms", type=float)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen-trace", help="generate a synthetic trace from a phase spec")
    g.add_argument("--spec", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_trace)

    lp = sub.add_parser("list-policies", help="list built-in policy types")
    lp.set_defaults(func=cmd_list_policies)

    for sp in (r, v, g, lp):
        sp.add_argument("--log-level", default=argparse.SUPPRESS,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PolicyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except (InputError, SpecError, RefsimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
