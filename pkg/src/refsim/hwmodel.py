"""Closed-form performance/power model and the per-tick platform step.

The same ``step`` function drives the trace simulator and the reflective
predictor, so a prediction over a constant workload reproduces what the
simulator will report.

Model
-----
seconds per instruction::

    spi = cpi_scale * cpi_base_ref / (f_ghz * 1e9) + mpi * mem_latency

core power at utilization u::

    P = u * (dyn_coeff * f_ghz**3 + static_active) + (1 - u) * idle_power

CPU time on a core is shared by water-filling: every task receives
min(fair share, demand) and slack is redistributed until nothing is left
or every task is satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from .actuation import ActuationState
from .errors import DegenerateSample
from .platform import CoreType, SysInfo
from .sensing import CoreRecord, SenseSample, TaskRecord

MIN_CPI_BASE = 0.1


@dataclass(frozen=True)
class Descriptors:
    cpi_base_ref: float
    mpi: float


def derive_descriptors(instructions: float, llc_misses: float, ref_freq_ghz: float,
                       sample_period_s: float, mem_latency_s: float) -> Descriptors:
    """Recover workload descriptors from one reference-config trace sample.

    The sample is assumed to have been captured with the task alone on a
    reference core at ``ref_freq_ghz`` and fully busy for the whole period.
    """
    if instructions <= 0:
        raise DegenerateSample("trace sample retired no instructions")
    f_hz = ref_freq_ghz * 1e9
    mpi = llc_misses / instructions
    cpi_total = f_hz * sample_period_s / instructions
    cpi_mem = mpi * mem_latency_s * f_hz
    return Descriptors(max(cpi_total - cpi_mem, MIN_CPI_BASE), mpi)


def spi(desc: Descriptors, core_type: CoreType, freq_ghz: float, mem_latency_s: float) -> float:
    return core_type.cpi_scale * desc.cpi_base_ref / (freq_ghz * 1e9) + desc.mpi * mem_latency_s


def core_power(core_type: CoreType, freq_ghz: float, utilization: float) -> float:
    active = core_type.dyn_coeff * freq_ghz ** 3 + core_type.static_active
    return utilization * active + (1.0 - utilization) * core_type.idle_power


def water_fill(demands: Sequence[float], capacity: float) -> list[float]:
    """Max-min fair split of ``capacity`` among ``demands`` (same units)."""
    n = len(demands)
    alloc = [0.0] * n
    remaining = capacity
    order = sorted(range(n), key=lambda i: (demands[i], i))
    for pos, i in enumerate(order):
        grant = min(max(demands[i], 0.0), remaining / (n - pos))
        alloc[i] = grant
        remaining -= grant
    return alloc


@dataclass
class CoreSchedule:
    runtimes: list[float]
    busy_time: float
    utilization: float


def schedule_core(demands: Sequence[float], tick: float) -> CoreSchedule:
    """Fair-share one core for one tick; demands are in seconds."""
    runtimes = water_fill([min(d, tick) for d in demands], tick)
    busy = min(math.fsum(runtimes), tick)
    return CoreSchedule(runtimes, busy, busy / tick)


def _counter(total: float) -> int:
    # integer counter reading of a fractional cumulative count
    return math.floor(total + total * 1e-12 + 1e-6)


class Runnable(Protocol):
    """What ``step`` needs from a task: demand in seconds, then consumption."""

    pending_overhead: float

    def demand(self, core_type: CoreType, freq_ghz: float, mem_latency_s: float,
               limit: float) -> float: ...

    def run(self, runtime: float, core_type: CoreType, freq_ghz: float,
            mem_latency_s: float) -> TaskRecord: ...


class ForecastTask:
    """A task with constant descriptors and unbounded remaining work."""

    def __init__(self, desc: Descriptors, pending_overhead: float = 0.0):
        self.desc = desc
        self.pending_overhead = pending_overhead
        self.retired = 0.0
        self._reported = 0

    def demand(self, core_type, freq_ghz, mem_latency_s, limit):
        return limit

    def run(self, runtime, core_type, freq_ghz, mem_latency_s) -> TaskRecord:
        overhead = min(runtime, self.pending_overhead)
        self.pending_overhead -= overhead
        n = (runtime - overhead) / spi(self.desc, core_type, freq_ghz, mem_latency_s)
        self.retired += n
        now = _counter(self.retired)
        rec = TaskRecord(instructions=now - self._reported, residency=runtime, retired=n,
                         base_cycles=self.desc.cpi_base_ref * n, misses=self.desc.mpi * n)
        self._reported = now
        return rec


def step(info: SysInfo, state: ActuationState, tasks: Mapping[int, Runnable],
         t_start: float, tick: float) -> SenseSample:
    """Advance ``tasks`` by one tick under ``state`` and return the sample."""
    lat = info.mem_latency
    per_core: list[list[int]] = [[] for _ in info.cores]
    for tid in sorted(tasks):
        per_core[state.task_map[tid]].append(tid)

    core_recs = []
    task_recs: dict[int, TaskRecord] = {}
    for c in info.cores:
        ctype = info.core_types[c.core_type]
        f = state.freq_ghz[c.domain]
        ids = per_core[c.id]
        demands = [tasks[t].demand(ctype, f, lat, tick) for t in ids]
        sched = schedule_core(demands, tick)
        rec = CoreRecord(busy_time=sched.busy_time,
                         power_avg=core_power(ctype, f, sched.utilization))
        for tid, r in zip(ids, sched.runtimes):
            trec = tasks[tid].run(r, ctype, f, lat)
            trec.core = c.id
            rec.instructions += trec.instructions
            rec.task_residency[tid] = r
            task_recs[tid] = trec
        core_recs.append(rec)
    return SenseSample(t_start, t_start + tick, core_recs, task_recs)
