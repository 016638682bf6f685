"""Trace-driven platform simulator.

Each tick: admit arrivals, run the baseline hardware step under the
committed actuation state, retire finished tasks, feed the sample to the
sensing hub, then let the policy manager execute every policy whose window
just closed. Actuations made at a boundary govern the following tick.
"""

from __future__ import annotations

import logging
import math

from . import hwmodel
from .actuation import ActuationState, Actuator
from .errors import InvalidPeriod, ValidationError
from .hwmodel import Descriptors, derive_descriptors, spi
from .platform import CoreType, SysInfo
from .reflection import ReflectiveModel
from .report import MetricsReport, ReportBuilder
from .sensing import SensingHub, TaskRecord
from .trace import TaskTrace, TaskTraceEntry, TraceError, check_against_platform

log = logging.getLogger(__name__)

_DONE_TOL = 1e-12


class Task:
    """Replays one task's trace through a consumption cursor.

    ``idx`` is the current sample and ``done`` the instructions of that
    sample already consumed. Descriptors are constant within a sample.
    """

    def __init__(self, entry: TaskTraceEntry, ref_freq_ghz: float, sample_period: float,
                 mem_latency: float):
        self.id = entry.task_id
        self.arrival_time = entry.arrival_time
        self.ref_freq_ghz = ref_freq_ghz
        self.N = [s.instructions for s in entry.samples]
        self.desc = [derive_descriptors(s.instructions, s.llc_misses, ref_freq_ghz,
                                        sample_period, mem_latency) for s in entry.samples]
        self.total = math.fsum(self.N)
        self.idx = 0
        self.done = 0.0
        self.retired = 0.0
        self._reported = 0
        self.pending_overhead = 0.0

    @property
    def fraction(self) -> float:
        return self.done / self.N[self.idx] if not self.exhausted else 0.0

    @property
    def exhausted(self) -> bool:
        return self.idx >= len(self.N)

    @property
    def descriptors(self) -> Descriptors:
        return self.desc[min(self.idx, len(self.desc) - 1)]

    def demand(self, core_type: CoreType, freq_ghz: float, mem_latency_s: float,
               limit: float) -> float:
        t = self.pending_overhead
        i, done = self.idx, self.done
        while i < len(self.N) and t < limit:
            t += (self.N[i] - done) * spi(self.desc[i], core_type, freq_ghz, mem_latency_s)
            i, done = i + 1, 0.0
        return min(t, limit)

    def run(self, runtime: float, core_type: CoreType, freq_ghz: float,
            mem_latency_s: float) -> TaskRecord:
        overhead = min(runtime, self.pending_overhead)
        self.pending_overhead -= overhead
        r = runtime - overhead
        n_tot = base = misses = 0.0
        while r > 0 and not self.exhausted:
            d = self.desc[self.idx]
            s = spi(d, core_type, freq_ghz, mem_latency_s)
            left = self.N[self.idx] - self.done
            need = left * s
            if need <= r * (1 + _DONE_TOL):
                n, r = left, max(r - need, 0.0)
                self.idx += 1
                self.done = 0.0
            else:
                n, r = r / s, 0.0
                self.done += n
            n_tot += n
            base += d.cpi_base_ref * n
            misses += d.mpi * n
        self.retired += n_tot
        if self.exhausted:
            self.retired = self.total
        now = hwmodel._counter(self.retired)
        rec = TaskRecord(instructions=now - self._reported, residency=runtime, retired=n_tot,
                         base_cycles=base, misses=misses)
        self._reported = now
        return rec


class Simulator:
    def __init__(self, info: SysInfo, trace: TaskTrace, manager=None, *, tick: float | None = None,
                 migration_penalty: float = 0.0, report_period: float | None = None):
        tick = trace.sample_period if tick is None else tick
        if not tick > 0:
            raise ValidationError("tick must be positive", field="tick_ms")
        if abs(tick - trace.sample_period) > 1e-12 * max(1.0, tick):
            raise ValidationError(f"trace sample period {trace.sample_ms} ms must equal the "
                                  f"simulator tick {tick * 1e3:g} ms", field="sample_ms")
        violations = check_against_platform(trace, info)
        if violations:
            raise TraceError(violations)
        if migration_penalty < 0:
            raise ValidationError("migration penalty must be >= 0", field="migration_penalty_ms")

        self.info = info
        self.trace = trace
        self.tick = tick
        self.migration_penalty = migration_penalty
        self.ticks = 0
        self.now = 0.0
        self.state = ActuationState(freq_ghz={d.id: d.available_freqs[0] for d in info.freq_domains})
        self.hub = SensingHub(info, tick)
        self.actuator = Actuator(info, self.state, on_migrate=self._on_migrate)
        self.tasks: dict[int, Task] = {}
        self.finished: dict[int, float] = {}
        self._pending = sorted(trace.tasks.values(), key=lambda e: (e.arrival_ms, e.task_id))
        self._rr = 0
        self.engine = ReflectiveModel(info, tick, self.hub, self.state, lambda: self.tasks,
                                      lambda: self.now, migration_penalty)
        self.actuation_log: list = []
        self.invocation_log: list[tuple[float, str]] = []
        self.migration_log: list[tuple[float, int, int, int]] = []
        self.report = ReportBuilder(info, tick, tick if report_period is None else report_period)
        self.manager = manager
        if manager is not None:
            manager.bind(self)

    def _on_migrate(self, tid: int, src: int, dst: int) -> None:
        self.migration_log.append((self.now, tid, src, dst))
        self.report.migration(self.ticks, dst)
        self.tasks[tid].pending_overhead += self.migration_penalty

    def _admit(self) -> None:
        ref_cores = self.info.cores_of_type(self.info.reference_type)
        while self._pending and self._pending[0].arrival_time <= self.now + self.tick * 1e-9:
            entry = self._pending.pop(0)
            t = Task(entry, self.trace.ref_freq_ghz, self.trace.sample_period, self.info.mem_latency)
            self.tasks[t.id] = t
            self.state.task_map[t.id] = ref_cores[self._rr % len(ref_cores)]
            self._rr += 1
            log.debug("t=%.3f s: task %d arrives on core %d", self.now, t.id, self.state.task_map[t.id])

    def step(self) -> None:
        self.now = self.ticks * self.tick
        self._admit()
        freqs = dict(self.state.freq_ghz)
        sample = hwmodel.step(self.info, self.state, self.tasks, self.now, self.tick)
        for tid in [t for t, task in self.tasks.items() if task.exhausted]:
            del self.tasks[tid]
            del self.state.task_map[tid]
            self.finished[tid] = sample.t_end
        self.report.add(sample, freqs)
        closed = self.hub.ingest(sample)
        self.ticks += 1
        self.now = self.ticks * self.tick
        if self.manager is not None:
            self.manager.on_boundary(self.now, closed)

    def run(self, duration: float) -> MetricsReport:
        ratio = duration / self.tick
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidPeriod(f"duration {duration} s is not a positive multiple of the tick")
        for _ in range(n):
            self.step()
        return self.report.build(self)


def run(platform: SysInfo, trace: TaskTrace, manager=None, duration: float = 1.0,
        **kwargs) -> MetricsReport:
    """Simulate ``duration`` seconds and return the metrics report."""
    return Simulator(platform, trace, manager, **kwargs).run(duration)
