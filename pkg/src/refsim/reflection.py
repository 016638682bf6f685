"""Reflective what-if queries over registered policy models.

A query runs the baseline hardware model tick by tick over the querying
policy's horizon on a scratch copy of the actuation state (with the
caller's staged overlay applied). After each tick, every registered model
whose period divides the elapsed time executes against the sub-window it
just observed, finest period first, and may stage new actuations on the
scratch state. Committed state, sensing windows and trace cursors are
never touched.

The workload forecast is persistence: each live task keeps the descriptors
it showed over the querying policy's last completed window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Mapping

from . import hwmodel
from .actuation import ActuationState, PredictionContext
from .env import ModelEnv
from .errors import (DuplicateModel, InvalidPeriod, NoCompletedWindow, NoForecast,
                     UnknownResource)
from .hwmodel import Descriptors, ForecastTask
from .platform import ResourceId, ResourceKind, SensorKind, SysInfo
from .sensing import SenseData, SensingHub

if TYPE_CHECKING:
    from .simulator import Task


class EntryKind(enum.Enum):
    POLICY_MODEL = "PolicyModel"
    BASELINE_HW_MODEL = "BaselineHwModel"


@dataclass
class RegistryEntry:
    handle: object
    period: float
    period_ticks: int
    kind: EntryKind


class ModelRegistry:
    """Period-ordered models, with the baseline hardware model at one tick."""

    def __init__(self, tick: float):
        self.tick = tick
        self.entries = [RegistryEntry(None, tick, 1, EntryKind.BASELINE_HW_MODEL)]

    def _ticks(self, period: float) -> int:
        ratio = period / self.tick if period > 0 else 0.0
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidPeriod(f"model period {period} s is not a positive multiple of the tick")
        return n

    def register(self, handle, period: float) -> None:
        n = self._ticks(period)
        claims = set(getattr(handle, "models", ()))
        for e in self.models():
            for kind, idx in getattr(e.handle, "models", ()):
                for k2, i2 in claims:
                    if kind is k2 and (idx is None or i2 is None or idx == i2):
                        raise DuplicateModel(f"{kind.value} is already modeled by {e.handle!r}")
            if n % e.period_ticks and e.period_ticks % n:
                raise InvalidPeriod(f"model periods {period} s and {e.period} s do not nest")
        self.entries.append(RegistryEntry(handle, period, n, EntryKind.POLICY_MODEL))
        self.entries.sort(key=lambda e: e.period_ticks)  # stable: registration order on ties

    def models(self) -> list[RegistryEntry]:
        return [e for e in self.entries if e.kind is EntryKind.POLICY_MODEL]


@dataclass(frozen=True)
class ForecastEntry:
    mpi: float
    cpi_base_ref: float
    demand_ips_ref: float


WorkloadForecast = dict  # task id -> ForecastEntry


@dataclass
class Prediction:
    data: SenseData
    final_state: ActuationState
    info: SysInfo

    def value(self, rid: ResourceId, kind: SensorKind) -> float:
        if rid.kind is not ResourceKind.TASK:
            self.info.check(rid)
        return self.data.value(self.info, rid, kind)


@dataclass(frozen=True)
class TaskPerformance:
    ips: float
    power_share: float


@dataclass
class QueryStats:
    queries: int = 0
    predictions: int = 0
    hw_steps: int = 0
    model_executions: int = 0
    per_model: dict = field(default_factory=dict)


class ReflectiveModel:
    def __init__(self, info: SysInfo, tick: float, hub: SensingHub, committed: ActuationState,
                 live_tasks: Callable[[], Mapping[int, Task]], now: Callable[[], float],
                 migration_penalty: float = 0.0):
        self.info = info
        self.tick = tick
        self.hub = hub
        self.committed = committed
        self.registry = ModelRegistry(tick)
        self._live_tasks = live_tasks
        self._now = now
        self.migration_penalty = migration_penalty
        self.stats = QueryStats()

    def register_model(self, handle, period: float) -> None:
        self.registry.register(handle, period)

    def forecast(self, window_id: int) -> WorkloadForecast:
        try:
            data = self.hub.last(window_id)
        except NoCompletedWindow:
            raise NoForecast(f"window {window_id} has no completed window to forecast from") from None
        ref = self.info.core_types[self.info.reference_type]
        lat = self.info.mem_latency
        out = {}
        for tid, task in self._live_tasks().items():
            tot = data.tasks.get(tid)
            if tot is not None and tot.retired > 0:
                desc = Descriptors(tot.base_cycles / tot.retired, tot.misses / tot.retired)
            else:
                desc = task.descriptors
            ips = 1.0 / hwmodel.spi(desc, ref, task.ref_freq_ghz, lat)
            out[tid] = ForecastEntry(desc.mpi, desc.cpi_base_ref, ips)
        return out

    def _horizon_ticks(self, horizon: float) -> int:
        ratio = horizon / self.tick
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidPeriod(f"horizon {horizon} s is not a positive multiple of the tick")
        return n

    def predict(self, ctx: PredictionContext, window_id: int, horizon: float) -> Prediction:
        n = self._horizon_ticks(horizon)
        models = self.registry.models()
        for m in models:
            if n % m.period_ticks:
                raise InvalidPeriod(f"model period {m.period} s does not divide horizon {horizon} s")
        forecast = self.forecast(window_id)

        state = ctx.resolved()
        live = self._live_tasks()
        tasks = {}
        for tid, fe in forecast.items():
            overhead = live[tid].pending_overhead
            if state.task_map[tid] != self.committed.task_map[tid]:
                overhead += self.migration_penalty
            tasks[tid] = ForecastTask(Descriptors(fe.cpi_base_ref, fe.mpi), overhead)

        num_cores = self.info.num_cores
        result = SenseData(num_cores)
        sub = [SenseData(num_cores) for _ in models]
        t0 = self._now()
        self.stats.predictions += 1
        for k in range(n):
            sample = hwmodel.step(self.info, state, tasks, t0 + k * self.tick, self.tick)
            self.stats.hw_steps += 1
            result.add(sample)
            for acc in sub:
                acc.add(sample)
            elapsed = k + 1
            for i, m in enumerate(models):
                if elapsed % m.period_ticks == 0:
                    env = ModelEnv(self.info, m.period, t0 + elapsed * self.tick, sub[i],
                                   state, self.committed)
                    m.handle.execute(env)
                    self.stats.model_executions += 1
                    name = getattr(m.handle, "name", repr(m.handle))
                    self.stats.per_model[name] = self.stats.per_model.get(name, 0) + 1
                    sub[i] = SenseData(num_cores)
        return Prediction(result, state, self.info)

    def sense_if(self, ctx: PredictionContext, rid: ResourceId, kind: SensorKind,
                 window_id: int, horizon: float) -> float:
        if rid.kind is ResourceKind.TASK:
            if rid.index not in self._live_tasks():
                raise UnknownResource(f"task {rid.index} is not live")
        else:
            self.info.check(rid)
        self.stats.queries += 1
        return self.predict(ctx, window_id, horizon).value(rid, kind)

    def predict_task_performance(self, ctx: PredictionContext, task_id: int,
                                 window_id: int, horizon: float) -> TaskPerformance:
        if task_id not in self._live_tasks():
            raise UnknownResource(f"task {task_id} is not live")
        self.stats.queries += 1
        pred = self.predict(ctx, window_id, horizon)
        rid = ResourceId(ResourceKind.TASK, task_id)
        return TaskPerformance(pred.value(rid, SensorKind.IPS),
                               pred.value(rid, SensorKind.POWER_WATTS))
