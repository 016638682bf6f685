"""Per-policy sensing windows fed from one shared sample stream.

Every window opens at a global alignment point (a multiple of its period
measured from t = 0) and closes at each following multiple. Counters
aggregate by sum; power is a time-weighted mean; IPS is derived as
instructions divided by window length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (InvalidPeriod, NoCompletedWindow, NonContiguousSample,
                     UnknownResource, UnsupportedKind)
from .platform import ResourceId, ResourceKind, SensorKind, SysInfo

_TIME_TOL = 1e-9


@dataclass
class CoreRecord:
    instructions: int = 0
    busy_time: float = 0.0
    power_avg: float = 0.0
    task_residency: dict[int, float] = field(default_factory=dict)


@dataclass
class TaskRecord:
    """Per-task totals for one sample.

    ``instructions`` is the integer counter delta; ``retired`` is the exact
    fractional work done. ``base_cycles`` and ``misses`` are
    instruction-weighted workload descriptors (sum of cpi_base_ref * n and
    mpi * n); they feed the persistence forecast and are not sensors.
    """

    instructions: int = 0
    core: int = -1
    residency: float = 0.0
    retired: float = 0.0
    base_cycles: float = 0.0
    misses: float = 0.0


@dataclass
class SenseSample:
    t_start: float
    t_end: float
    cores: list[CoreRecord]
    tasks: dict[int, TaskRecord] = field(default_factory=dict)

    @property
    def length(self) -> float:
        return self.t_end - self.t_start

    def validate(self) -> None:
        length = self.length
        if not length > 0:
            raise ValueError(f"sample interval [{self.t_start}, {self.t_end}] is empty")
        for cid, rec in enumerate(self.cores):
            if rec.busy_time > length * (1 + 1e-12):
                raise ValueError(f"core {cid}: busy_time {rec.busy_time} exceeds interval {length}")
            if abs(math.fsum(rec.task_residency.values()) - rec.busy_time) > 1e-9:
                raise ValueError(f"core {cid}: task residencies do not sum to busy_time")


@dataclass
class TaskTotals:
    instructions: int = 0
    retired: float = 0.0
    busy: float = 0.0
    energy: float = 0.0
    base_cycles: float = 0.0
    misses: float = 0.0


class SenseData:
    """Aggregated sensor values over one window."""

    def __init__(self, num_cores: int):
        self.length = 0.0
        self.core_instr = [0] * num_cores
        self.core_busy = [0.0] * num_cores
        self.core_energy = [0.0] * num_cores
        self.core_task_seconds = [0.0] * num_cores
        self.tasks: dict[int, TaskTotals] = {}

    def add(self, sample: SenseSample) -> None:
        dt = sample.length
        self.length += dt
        for cid, rec in enumerate(sample.cores):
            self.core_instr[cid] += rec.instructions
            self.core_busy[cid] += rec.busy_time
            self.core_energy[cid] += rec.power_avg * dt
            self.core_task_seconds[cid] += len(rec.task_residency) * dt
        for tid, trec in sample.tasks.items():
            tot = self.tasks.get(tid)
            if tot is None:
                tot = self.tasks[tid] = TaskTotals()
            tot.instructions += trec.instructions
            tot.retired += trec.retired
            tot.busy += trec.residency
            if trec.core >= 0:
                tot.energy += trec.residency * sample.cores[trec.core].power_avg
            tot.base_cycles += trec.base_cycles
            tot.misses += trec.misses

    def _core_set(self, info: SysInfo | None, rid: ResourceId) -> range | tuple[int, ...]:
        n = len(self.core_instr)
        if rid.kind is ResourceKind.SYSTEM:
            return range(n)
        if rid.kind is ResourceKind.CORE:
            if not 0 <= rid.index < n:
                raise UnknownResource(f"core {rid.index} does not exist")
            return (rid.index,)
        if info is None:
            raise UnknownResource("domain lookups need a SysInfo")
        return info.cores_in_domain(rid.index)

    def value(self, info: SysInfo | None, rid: ResourceId, kind: SensorKind) -> float:
        if rid.kind is ResourceKind.TASK:
            tot = self.tasks.get(rid.index)
            if tot is None:
                raise UnknownResource(f"task {rid.index} has no records in this window")
            if kind is SensorKind.INSTRUCTIONS_RETIRED:
                return tot.instructions
            if kind is SensorKind.IPS:
                return tot.instructions / self.length
            if kind is SensorKind.BUSY_TIME_SEC:
                return tot.busy
            if kind is SensorKind.ENERGY_JOULES:
                return tot.energy
            if kind is SensorKind.POWER_WATTS:
                return tot.energy / self.length
            raise UnsupportedKind(f"{kind.value} is not defined for tasks")

        cores = self._core_set(info, rid)
        if kind is SensorKind.INSTRUCTIONS_RETIRED:
            return sum(self.core_instr[c] for c in cores)
        if kind is SensorKind.IPS:
            return sum(self.core_instr[c] for c in cores) / self.length
        if kind is SensorKind.BUSY_TIME_SEC:
            return math.fsum(self.core_busy[c] for c in cores)
        if kind is SensorKind.ENERGY_JOULES:
            return math.fsum(self.core_energy[c] for c in cores)
        if kind is SensorKind.POWER_WATTS:
            return math.fsum(self.core_energy[c] for c in cores) / self.length
        if kind is SensorKind.NUM_TASKS:
            return math.fsum(self.core_task_seconds[c] for c in cores) / self.length
        raise UnsupportedKind(kind)

    def utilization(self, core_id: int) -> float:
        return self.core_busy[core_id] / self.length if self.length else 0.0


@dataclass
class SensingWindow:
    window_id: int
    period: float
    period_ticks: int
    owner: object
    start_tick: int
    accumulator: SenseData
    history: SenseData | None = None
    closings: int = 0


class SensingHub:
    """Fans one sample stream out to any number of aligned windows."""

    def __init__(self, info: SysInfo, tick: float):
        if tick <= 0:
            raise InvalidPeriod("tick must be positive")
        self.info = info
        self.tick = tick
        self.windows: dict[int, SensingWindow] = {}
        self.ticks_done = 0
        self._last_end: float | None = None

    def period_ticks(self, period: float) -> int:
        """Convert a period in seconds to a whole number of ticks."""
        ratio = period / self.tick
        n = round(ratio)
        if not period > 0 or n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidPeriod(f"period {period} s is not a positive multiple of the {self.tick} s tick")
        return n

    def register_window(self, period: float, owner: object = None) -> int:
        n = self.period_ticks(period)
        wid = len(self.windows)
        start = -(-self.ticks_done // n) * n
        self.windows[wid] = SensingWindow(
            window_id=wid, period=period, period_ticks=n, owner=owner,
            start_tick=start, accumulator=SenseData(self.info.num_cores))
        return wid

    def ingest(self, sample: SenseSample) -> list[int]:
        """Feed one tick-length sample; return ids of windows that closed."""
        if self._last_end is not None and abs(sample.t_start - self._last_end) > _TIME_TOL:
            raise NonContiguousSample(
                f"sample starts at {sample.t_start} but previous sample ended at {self._last_end}")
        if abs(sample.length - self.tick) > _TIME_TOL:
            raise NonContiguousSample(f"sample length {sample.length} differs from tick {self.tick}")
        sample.validate()

        tick_index = self.ticks_done
        self.ticks_done += 1
        self._last_end = sample.t_end
        closed = []
        for w in self.windows.values():
            if tick_index < w.start_tick:
                continue
            w.accumulator.add(sample)
            if self.ticks_done % w.period_ticks == 0:
                w.history = w.accumulator
                w.accumulator = SenseData(self.info.num_cores)
                w.closings += 1
                closed.append(w)
        closed.sort(key=lambda w: (w.period_ticks, w.window_id))
        return [w.window_id for w in closed]

    def window(self, window_id: int) -> SensingWindow:
        try:
            return self.windows[window_id]
        except KeyError:
            raise UnknownResource(f"sensing window {window_id} does not exist") from None

    def last(self, window_id: int) -> SenseData:
        w = self.window(window_id)
        if w.history is None:
            raise NoCompletedWindow(f"window {window_id} has not completed yet")
        return w.history

    def sense(self, window_id: int, rid: ResourceId, kind: SensorKind) -> float:
        data = self.last(window_id)
        self.info.check(rid)
        return data.value(self.info, rid, kind)
