"""Policy composition and scenario switching.

Subclass ``PolicyManager`` and override ``setup`` to register policies and
models, or build one from a configuration document (see ``config``).
Scenario switches, whether scripted or triggered by a sensed predicate,
take effect atomically at a tick boundary before any policy runs there.
"""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .env import PolicyEnv
from .errors import DuplicateName, InvalidPeriod, PolicyError, UnknownScenario
from .platform import ResourceId, SensorKind
from .policies.base import Mode, Policy

if TYPE_CHECKING:
    from .platform import SysInfo
    from .simulator import Simulator

log = logging.getLogger(__name__)

_OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


@dataclass
class Trigger:
    """Switch to the owning scenario when ``metric(resource) op threshold``
    holds over a window of ``period`` seconds."""

    metric: SensorKind
    resource: ResourceId
    op: str
    threshold: float
    period: float

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"trigger op must be one of {sorted(_OPS)}")

    def fires(self, value: float) -> bool:
        return _OPS[self.op](value, self.threshold)


@dataclass
class Scenario:
    name: str
    policies: list[str] = field(default_factory=list)
    trigger: Trigger | None = None


class PolicyManager:
    def __init__(self):
        self.policies: dict[str, Policy] = {}
        self.models: list[tuple[Policy, float]] = []
        self.scenarios: dict[str, Scenario] = {}
        self.active: str | None = None
        self.initial_scenario: str | None = None
        self.events: list[tuple[float, str]] = []
        self.event_map: dict[str, str] = {}
        self.sim: Simulator | None = None
        self._pending: str | None = None
        self._next_event = 0
        self._windows: dict[int, Policy] = {}
        self._triggers: dict[int, Scenario] = {}
        self.scenario_log: list[tuple[float, str]] = []

    # -- composition ----------------------------------------------------

    def setup(self, sys_info: SysInfo) -> None:
        """Hook for subclasses: register policies and models here."""

    def register_policy(self, policy: Policy) -> None:
        if policy.name in self.policies:
            raise DuplicateName(f"policy {policy.name!r} is already registered")
        if not policy.period > 0:
            raise InvalidPeriod(f"policy {policy.name!r} has non-positive period")
        if self.sim is not None:
            self._open_window(policy)
        self.policies[policy.name] = policy

    def register_model(self, model: Policy, period: float | None = None) -> None:
        period = model.period if period is None else period
        if not period > 0:
            raise InvalidPeriod("model period must be positive")
        model.mode = Mode.MODEL_ONLY
        if self.sim is not None:
            self.sim.engine.register_model(model, period)
        self.models.append((model, period))

    def add_scenario(self, scenario: Scenario) -> None:
        if scenario.name in self.scenarios:
            raise DuplicateName(f"scenario {scenario.name!r} already exists")
        self.scenarios[scenario.name] = scenario
        if self.sim is not None:
            self._check_scenario(scenario)
            if scenario.trigger is not None:
                self._open_trigger(scenario)

    def schedule_event(self, time_s: float, event: str) -> None:
        self.events.append((time_s, event))
        self.events.sort(key=lambda e: e[0])

    # -- binding ----------------------------------------------------------

    def bind(self, sim: Simulator) -> None:
        self.setup(sim.info)
        self.sim = sim
        for policy in self.policies.values():
            self._open_window(policy)
        for model, period in self.models:
            sim.engine.register_model(model, period)
        self.check()
        for sc in self.scenarios.values():
            if sc.trigger is not None:
                self._open_trigger(sc)
        if self.scenarios:
            self.active = self.initial_scenario or next(iter(self.scenarios))
            self.scenario_log.append((sim.now, self.active))

    def check(self) -> None:
        """Cross-check scenarios, events and the initial scenario."""
        for sc in self.scenarios.values():
            self._check_scenario(sc)
        for _, event in self.events:
            self._resolve(event)
        if self.initial_scenario is not None and self.initial_scenario not in self.scenarios:
            raise UnknownScenario(f"initial scenario {self.initial_scenario!r} is not defined")

    def _open_window(self, policy: Policy) -> None:
        wid = self.sim.hub.register_window(policy.period, owner=policy)
        self._windows[wid] = policy

    def _open_trigger(self, scenario: Scenario) -> None:
        wid = self.sim.hub.register_window(scenario.trigger.period, owner=scenario)
        self._triggers[wid] = scenario

    def _check_scenario(self, scenario: Scenario) -> None:
        missing = [p for p in scenario.policies if p not in self.policies]
        if missing:
            raise UnknownScenario(f"scenario {scenario.name!r} names unregistered policies {missing}")

    def _resolve(self, event: str) -> str:
        name = self.event_map.get(event, event)
        if name not in self.scenarios:
            raise UnknownScenario(f"event {event!r} names no defined scenario")
        return name

    # -- runtime ------------------------------------------------------------

    def is_active(self, name: str) -> bool:
        if not self.scenarios:
            return True
        return name in self.scenarios[self.active].policies

    def active_policies(self) -> list[str]:
        return [p for p in self.policies if self.is_active(p)]

    def switch_scenario(self, event: str) -> None:
        """Request a scenario switch; it lands at the next tick boundary."""
        self._pending = self._resolve(event)

    def _apply_pending(self, now: float) -> None:
        if self._pending is None:
            return
        target, self._pending = self._pending, None
        if target == self.active:
            return
        log.info("t=%.3f s: scenario %s -> %s", now, self.active, target)
        self.active = target
        self.scenario_log.append((now, target))

    def on_boundary(self, now: float, closed: list[int]) -> None:
        """Called by the simulator after every tick with the windows that closed."""
        sim = self.sim
        while self._next_event < len(self.events) and self.events[self._next_event][0] <= now + 1e-12:
            self.switch_scenario(self.events[self._next_event][1])
            self._next_event += 1
        for wid in closed:
            sc = self._triggers.get(wid)
            if sc is not None and sc.name != self.active:
                value = sim.hub.sense(wid, sc.trigger.resource, sc.trigger.metric)
                if sc.trigger.fires(value):
                    self._pending = sc.name
        self._apply_pending(now)

        for wid in closed:
            policy = self._windows.get(wid)
            if policy is None or not self.is_active(policy.name):
                continue
            env = PolicyEnv(sim, policy, wid, self.active)
            sim.invocation_log.append((now, policy.name))
            try:
                policy.execute(env)
            except Exception as exc:
                raise PolicyError(policy.name, exc) from exc
