"""The interface handed to a policy's ``execute``.

Two flavours share one surface:

* ``PolicyEnv`` for a policy running for real: ``sense`` reads the
  policy's last completed window and ``actuate`` commits.
* ``ModelEnv`` for a policy executing as a model inside a reflective
  query: ``sense`` reads the predicted sub-window, ``try_actuate`` updates
  the query's scratch state, and ``actuate`` is refused.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from .actuation import ActuationState, PredictionContext, actuation_ranges, check_value
from .errors import ModelMayNotActuate, RecursiveQuery
from .platform import ActuatorKind, ResourceId, ResourceKind, SensorKind, SysInfo
from .sensing import SenseData

if TYPE_CHECKING:
    from .reflection import Prediction, TaskPerformance
    from .simulator import Simulator


@dataclass(frozen=True)
class ActuationEvent:
    time: float
    policy: str
    scenario: str | None
    resource: ResourceId
    kind: ActuatorKind
    value: Any


class PolicyEnv:
    is_model = False

    def __init__(self, sim: Simulator, policy, window_id: int, scenario: str | None = None):
        self._sim = sim
        self._policy = policy
        self._scenario = scenario
        self.sys_info: SysInfo = sim.info
        self.window_id = window_id
        self.period: float = policy.period
        self.now: float = sim.now
        self.ctx = PredictionContext(sim.info, sim.state)

    @property
    def window_length(self) -> float:
        return self._sim.hub.last(self.window_id).length

    def tasks(self) -> list[int]:
        return sorted(self._sim.state.task_map)

    def sense(self, rid: ResourceId, kind: SensorKind) -> float:
        return self._sim.hub.sense(self.window_id, rid, kind)

    def actuate(self, rid: ResourceId, kind: ActuatorKind, value) -> None:
        self._sim.actuator.actuate(rid, kind, value)
        self._sim.actuation_log.append(ActuationEvent(
            self.now, self._policy.name, self._scenario, rid, kind,
            self._sim.actuator.actuation_val(rid, kind)))

    def actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        return self._sim.actuator.actuation_val(rid, kind)

    def actuation_ranges(self, rid: ResourceId, kind: ActuatorKind):
        return self._sim.actuator.actuation_ranges(rid, kind)

    def try_actuate(self, rid: ResourceId, kind: ActuatorKind, value) -> None:
        self.ctx.try_actuate(rid, kind, value)

    def try_actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        return self.ctx.try_actuation_val(rid, kind)

    def reset(self) -> None:
        """Drop everything staged with try_actuate."""
        self.ctx.clear()

    def predict(self, horizon: float | None = None) -> Prediction:
        return self._sim.engine.predict(self.ctx, self.window_id,
                                        self.period if horizon is None else horizon)

    def sense_if(self, rid: ResourceId, kind: SensorKind, horizon: float | None = None) -> float:
        return self._sim.engine.sense_if(self.ctx, rid, kind, self.window_id,
                                         self.period if horizon is None else horizon)

    def predict_task_performance(self, task_id: int, horizon: float | None = None) -> TaskPerformance:
        return self._sim.engine.predict_task_performance(
            self.ctx, task_id, self.window_id, self.period if horizon is None else horizon)


class ModelEnv:
    is_model = True

    def __init__(self, info: SysInfo, period: float, now: float, data: SenseData,
                 scratch: ActuationState, committed: ActuationState):
        self.sys_info = info
        self.period = period
        self.now = now
        self.window_id = None
        self._data = data
        self._scratch = scratch
        self._committed = committed

    @property
    def window_length(self) -> float:
        return self._data.length

    def tasks(self) -> list[int]:
        return sorted(self._scratch.task_map)

    def sense(self, rid: ResourceId, kind: SensorKind) -> float:
        if rid.kind is not ResourceKind.TASK:
            self.sys_info.check(rid)
        return self._data.value(self.sys_info, rid, kind)

    def actuate(self, rid, kind, value) -> None:
        raise ModelMayNotActuate("a registered model may only stage actuations with try_actuate")

    def actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        ctx = PredictionContext(self.sys_info, self._committed)
        return ctx.try_actuation_val(rid, kind)

    def actuation_ranges(self, rid: ResourceId, kind: ActuatorKind):
        return actuation_ranges(self.sys_info, rid, kind, self._scratch.task_map.keys())

    def try_actuate(self, rid: ResourceId, kind: ActuatorKind, value) -> None:
        value = check_value(self.sys_info, rid, kind, value, self._scratch.task_map.keys())
        if kind is ActuatorKind.FREQUENCY:
            self._scratch.freq_ghz[rid.index] = value
        else:
            self._scratch.task_map[rid.index] = value

    def try_actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        ctx = PredictionContext(self.sys_info, self._scratch)
        return ctx.try_actuation_val(rid, kind)

    def reset(self) -> None:
        pass

    def _no_query(self, *args, **kwargs):
        raise RecursiveQuery("models may not issue reflective queries")

    predict = sense_if = predict_task_performance = _no_query
