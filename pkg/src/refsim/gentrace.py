"""Synthetic trace generator for tests and experiments.

A generator spec is JSON::

    {"ref_freq_ghz": 2.0, "sample_ms": 10, "ref_core_type": "little",
     "mem_latency_ns": 100,
     "tasks": [{"id": 0, "arrival_ms": 0,
                "phases": [{"duration_ms": 500, "cpi_base": 2.0, "mpi": 0.0,
                            "jitter": 0.05}]}]}

``cpi_base``/``mpi`` may also be spelled ``target_cpi_base``/``target_mpi``.
Each sample is sized so that ``derive_descriptors`` recovers its targets.
With ``jitter`` > 0 every sample's targets are scaled by a seeded
multiplicative noise term that is re-centered per phase, so the phase mean
stays exactly on target whatever the seed.
"""

from __future__ import annotations

import json
import math
import random

from .errors import SpecError
from .hwmodel import MIN_CPI_BASE, derive_descriptors
from .trace import TaskTrace, TaskTraceEntry, TraceSample, dump_trace, load_trace

ROUND_TRIP_TOL = 1e-6


def _get(obj: dict, *keys, default=None):
    for k in keys:
        if k in obj:
            return obj[k]
    if default is None:
        raise SpecError(f"missing {keys[0]!r}")
    return default


def _centered(rng: random.Random, n: int, amplitude: float) -> list[float]:
    if amplitude == 0 or n == 0:
        return [0.0] * n
    draws = [rng.uniform(-amplitude, amplitude) for _ in range(n)]
    mean = math.fsum(draws) / n
    return [d - mean for d in draws]


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= ROUND_TRIP_TOL * max(abs(b), 1e-12) or abs(a - b) <= 1e-15


def generate(spec: dict, seed: int = 0) -> TaskTrace:
    if not isinstance(spec, dict):
        raise SpecError("generator spec must be a JSON object")
    rng = random.Random(seed)
    f_ref = float(_get(spec, "ref_freq_ghz"))
    t_ms = float(_get(spec, "sample_ms"))
    ref_type = str(_get(spec, "ref_core_type"))
    lat = float(_get(spec, "mem_latency_ns")) * 1e-9
    if f_ref <= 0 or t_ms <= 0 or lat <= 0:
        raise SpecError("ref_freq_ghz, sample_ms and mem_latency_ns must be positive")
    t_s = t_ms / 1000
    f_hz = f_ref * 1e9

    tasks = {}
    for ti, tspec in enumerate(_get(spec, "tasks")):
        tid = int(tspec.get("id", ti))
        if tid in tasks:
            raise SpecError(f"duplicate task id {tid}")
        entry = TaskTraceEntry(tid, float(tspec.get("arrival_ms", 0)))
        for pi, ph in enumerate(_get(tspec, "phases")):
            where = f"task {tid} phase {pi}"
            dur = float(_get(ph, "duration_ms"))
            cpi = float(_get(ph, "cpi_base", "target_cpi_base"))
            mpi = float(_get(ph, "mpi", "target_mpi"))
            jitter = float(ph.get("jitter", 0.0))
            ratio = dur / t_ms
            n = round(ratio)
            if n < 1 or abs(ratio - n) > 1e-9 * ratio:
                raise SpecError(f"{where}: duration_ms {dur} is not a positive multiple of sample_ms")
            if not 0 <= jitter < 1:
                raise SpecError(f"{where}: jitter must be in [0, 1)")
            if not 0 <= mpi <= 1:
                raise SpecError(f"{where}: mpi {mpi} outside [0, 1]")
            cpi_noise = _centered(rng, n, jitter)
            mpi_noise = _centered(rng, n, jitter)
            for k in range(n):
                c = cpi * (1 + cpi_noise[k])
                m = mpi * (1 + mpi_noise[k])
                if c < MIN_CPI_BASE:
                    raise SpecError(f"{where}: cpi_base {c:g} is below the {MIN_CPI_BASE} floor "
                                    f"and cannot be represented")
                if m > 1:
                    raise SpecError(f"{where}: jittered mpi {m:g} exceeds 1")
                instr = f_hz * t_s / (c + m * lat * f_hz)
                entry.samples.append(TraceSample(instr, m * instr))
        tasks[tid] = entry

    trace = TaskTrace(f_ref, t_ms, ref_type, tasks)
    _check_round_trip(spec, trace, lat, seed)
    return trace


def _check_round_trip(spec: dict, trace: TaskTrace, lat: float, seed: int) -> None:
    # re-derive from the serialized text, not the in-memory floats
    reread = load_trace(dump_trace(trace))
    rng = random.Random(seed)
    for ti, tspec in enumerate(spec["tasks"]):
        tid = int(tspec.get("id", ti))
        samples = iter(reread.tasks[tid].samples)
        for ph in tspec["phases"]:
            n = round(float(ph["duration_ms"]) / trace.sample_ms)
            cpi = float(_get(ph, "cpi_base", "target_cpi_base"))
            mpi = float(_get(ph, "mpi", "target_mpi"))
            jitter = float(ph.get("jitter", 0.0))
            cn, mn = _centered(rng, n, jitter), _centered(rng, n, jitter)
            for k in range(n):
                s = next(samples)
                d = derive_descriptors(s.instructions, s.llc_misses, reread.ref_freq_ghz,
                                       reread.sample_period, lat)
                if not (_close(d.cpi_base_ref, cpi * (1 + cn[k])) and _close(d.mpi, mpi * (1 + mn[k]))):
                    raise SpecError(f"task {tid}: sample does not round-trip to its targets "
                                    f"(got cpi_base={d.cpi_base_ref!r}, mpi={d.mpi!r})")


def generate_text(spec_text: str, seed: int = 0) -> str:
    try:
        spec = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"generator spec is not valid JSON: {exc}") from None
    try:
        return dump_trace(generate(spec, seed))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from None
