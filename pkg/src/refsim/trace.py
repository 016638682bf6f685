"""Reference-configuration workload traces.

File layout::

    #mars-trace v1 ref_freq_ghz=2.0 sample_ms=10 ref_core_type=little
    task_id,arrival_ms,sample_index,instructions,llc_misses
    0,0,0,10000000,0
    0,0,1,10000000,0
    ...

The column-name row is optional. Rows are sorted by (task_id,
sample_index), sample indices run 0, 1, 2, ... per task, and arrival_ms is
constant within a task. Counts may be written as integers or decimals.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .platform import SysInfo

MAGIC = "#mars-trace"
VERSION = "v1"
COLUMNS = ("task_id", "arrival_ms", "sample_index", "instructions", "llc_misses")


@dataclass(frozen=True)
class TraceSample:
    instructions: float
    llc_misses: float


@dataclass
class TaskTraceEntry:
    task_id: int
    arrival_ms: float
    samples: list[TraceSample] = field(default_factory=list)

    @property
    def arrival_time(self) -> float:
        return self.arrival_ms / 1000

    @property
    def total_instructions(self) -> float:
        return sum(s.instructions for s in self.samples)


@dataclass
class TaskTrace:
    ref_freq_ghz: float
    sample_ms: float
    ref_core_type: str
    tasks: dict[int, TaskTraceEntry]

    @property
    def sample_period(self) -> float:
        return self.sample_ms / 1000


class TraceError(ValidationError):
    """Carries every violation found while reading a trace."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _parse_header(line: str) -> dict[str, str]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != MAGIC:
        raise ParseError(f"trace must start with '{MAGIC} {VERSION} ...', got {line!r}")
    if parts[1] != VERSION:
        raise ParseError(f"unsupported trace version {parts[1]!r}")
    out = {}
    for kv in parts[2:]:
        key, sep, value = kv.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {kv!r}")
        out[key] = value
    for key in ("ref_freq_ghz", "sample_ms", "ref_core_type"):
        if key not in out:
            raise ParseError(f"trace header is missing {key}")
    return out


def _num(text: str, what: str, line_no: int, violations: list[str]) -> float | None:
    try:
        return float(text)
    except ValueError:
        violations.append(f"line {line_no}: {what} {text!r} is not a number")
        return None


def check_trace(text: str, info: SysInfo | None = None) -> tuple[TaskTrace | None, list[str]]:
    """Parse ``text`` and collect every invariant violation.

    Returns the trace (None when the header itself is unreadable) and the
    list of violations. Platform cross-checks run only when ``info`` is given.
    """
    lines = text.splitlines()
    if not lines:
        return None, ["trace is empty"]
    try:
        header = _parse_header(lines[0])
    except ParseError as exc:
        return None, [str(exc)]

    violations: list[str] = []
    f_ref = _num(header["ref_freq_ghz"], "ref_freq_ghz", 1, violations)
    t_ms = _num(header["sample_ms"], "sample_ms", 1, violations)
    if f_ref is not None and f_ref <= 0:
        violations.append("header: ref_freq_ghz must be > 0")
    if t_ms is not None and t_ms <= 0:
        violations.append("header: sample_ms must be > 0")
    trace = TaskTrace(ref_freq_ghz=f_ref or 0.0, sample_ms=t_ms or 0.0,
                      ref_core_type=header["ref_core_type"], tasks={})

    last_key: tuple[int, int] | None = None
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    for offset, row in enumerate(reader):
        line_no = offset + 2
        if not row or all(not c.strip() for c in row):
            continue
        if tuple(c.strip() for c in row) == COLUMNS:
            continue
        if len(row) != len(COLUMNS):
            violations.append(f"line {line_no}: expected {len(COLUMNS)} columns, got {len(row)}")
            continue
        try:
            tid = int(row[0])
            idx = int(row[2])
        except ValueError:
            violations.append(f"line {line_no}: task_id and sample_index must be integers")
            continue
        arrival = _num(row[1], "arrival_ms", line_no, violations)
        n = _num(row[3], "instructions", line_no, violations)
        m = _num(row[4], "llc_misses", line_no, violations)
        if arrival is None or n is None or m is None:
            continue
        if tid < 0:
            violations.append(f"line {line_no}: task_id must be >= 0")
        if arrival < 0:
            violations.append(f"line {line_no}: arrival_ms must be >= 0")
        if not n > 0:
            violations.append(f"line {line_no}: instructions must be > 0")
        if m < 0:
            violations.append(f"line {line_no}: llc_misses must be >= 0")
        if m > n:
            violations.append(f"line {line_no}: llc_misses exceeds instructions")

        key = (tid, idx)
        if last_key is not None and key <= last_key:
            violations.append(f"line {line_no}: rows not sorted by (task_id, sample_index) "
                              f"(non-monotone sample_index {idx} after {last_key})")
        last_key = key
        entry = trace.tasks.get(tid)
        if entry is None:
            entry = trace.tasks[tid] = TaskTraceEntry(tid, arrival)
        elif entry.arrival_ms != arrival:
            violations.append(f"line {line_no}: arrival_ms changes within task {tid}")
        if idx != len(entry.samples):
            violations.append(f"line {line_no}: task {tid} sample_index {idx} "
                              f"expected {len(entry.samples)} (non-monotone sample_index)")
        entry.samples.append(TraceSample(n, m))

    if not trace.tasks:
        violations.append("trace has no samples")
    if info is not None:
        violations.extend(check_against_platform(trace, info))
    return trace, violations


def check_against_platform(trace: TaskTrace, info: SysInfo) -> list[str]:
    out = []
    ref = info.core_types[info.reference_type]
    if trace.ref_core_type != ref.name:
        out.append(f"header: ref_core_type {trace.ref_core_type!r} is not the platform's "
                   f"reference core type {ref.name!r}")
    freqs = {f for d in info.freq_domains if d.core_type == info.reference_type
             for f in d.available_freqs}
    if trace.ref_freq_ghz not in freqs:
        out.append(f"header: ref_freq_ghz {trace.ref_freq_ghz} is not available on the "
                   f"reference core type (available: {sorted(freqs)})")
    return out


def load_trace(text: str, info: SysInfo | None = None) -> TaskTrace:
    trace, violations = check_trace(text, info)
    if trace is None:
        raise ParseError(violations[0])
    if violations:
        raise TraceError(violations)
    return trace


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dump_trace(trace: TaskTrace) -> str:
    out = io.StringIO()
    out.write(f"{MAGIC} {VERSION} ref_freq_ghz={_fmt(trace.ref_freq_ghz)} "
              f"sample_ms={_fmt(trace.sample_ms)} ref_core_type={trace.ref_core_type}\n")
    out.write(",".join(COLUMNS) + "\n")
    for tid in sorted(trace.tasks):
        entry = trace.tasks[tid]
        arrival = _fmt(entry.arrival_ms)
        for i, s in enumerate(entry.samples):
            out.write(f"{tid},{arrival},{i},{_fmt(s.instructions)},{_fmt(s.llc_misses)}\n")
    return out.getvalue()
