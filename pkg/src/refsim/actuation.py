"""Committed actuator state and the staging overlay used by reflective queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import OutOfRange, UnknownResource, UnsupportedKind
from .platform import ActuatorKind, ResourceId, ResourceKind, SysInfo


@dataclass
class ActuationState:
    freq_ghz: dict[int, float] = field(default_factory=dict)
    task_map: dict[int, int] = field(default_factory=dict)

    def copy(self) -> ActuationState:
        return ActuationState(dict(self.freq_ghz), dict(self.task_map))


def actuation_ranges(info: SysInfo, rid: ResourceId, kind: ActuatorKind,
                     live_tasks: Iterable[int] | None = None):
    """Valid values for an actuator: a frequency list or a set of core ids."""
    if kind is ActuatorKind.FREQUENCY:
        if rid.kind is not ResourceKind.FREQ_DOMAIN:
            raise UnsupportedKind("Frequency is actuated per frequency domain")
        return list(info.freq_range_of_domain(rid.index))
    if kind is ActuatorKind.TASK_CORE_MAP:
        if rid.kind is not ResourceKind.TASK:
            raise UnsupportedKind("TaskCoreMap is actuated per task")
        if live_tasks is not None and rid.index not in live_tasks:
            raise UnknownResource(f"task {rid.index} is not live")
        return set(range(info.num_cores))
    raise UnsupportedKind(kind)


def check_value(info: SysInfo, rid: ResourceId, kind: ActuatorKind, value,
                live_tasks: Iterable[int]):
    """Validate ``value`` and return it normalized to the table entry."""
    allowed = actuation_ranges(info, rid, kind, live_tasks)
    if kind is ActuatorKind.FREQUENCY:
        # exact table match, no snapping
        if isinstance(value, bool) or value not in allowed:
            raise OutOfRange(f"{value} GHz is not available on domain {rid.index}: {allowed}")
        return allowed[allowed.index(value)]
    if isinstance(value, bool) or not isinstance(value, int) or value not in allowed:
        raise OutOfRange(f"core {value!r} does not exist")
    return value


def _read(state: ActuationState, rid: ResourceId, kind: ActuatorKind):
    if kind is ActuatorKind.FREQUENCY:
        return state.freq_ghz[rid.index]
    return state.task_map[rid.index]


def _write(state: ActuationState, rid: ResourceId, kind: ActuatorKind, value) -> None:
    if kind is ActuatorKind.FREQUENCY:
        state.freq_ghz[rid.index] = value
    else:
        state.task_map[rid.index] = value


class Actuator:
    """The committed actuation interface.

    Writes land in ``state`` immediately; the simulator reads the state at
    the start of each tick, so a value set between ticks governs the next one.
    ``on_migrate(task, src, dst)`` is called whenever a mapping changes core.
    """

    def __init__(self, info: SysInfo, state: ActuationState,
                 on_migrate: Callable[[int, int, int], None] | None = None):
        self.info = info
        self.state = state
        self.on_migrate = on_migrate
        self.migrations = 0

    def live_tasks(self):
        return self.state.task_map.keys()

    def actuate(self, rid: ResourceId, kind: ActuatorKind, value) -> None:
        value = check_value(self.info, rid, kind, value, self.live_tasks())
        if kind is ActuatorKind.TASK_CORE_MAP:
            old = self.state.task_map[rid.index]
            if old != value:
                self.migrations += 1
                if self.on_migrate is not None:
                    self.on_migrate(rid.index, old, value)
        _write(self.state, rid, kind, value)

    def actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        actuation_ranges(self.info, rid, kind, self.live_tasks())
        return _read(self.state, rid, kind)

    def actuation_ranges(self, rid: ResourceId, kind: ActuatorKind):
        return actuation_ranges(self.info, rid, kind, self.live_tasks())


class PredictionContext:
    """Hypothetical actuations staged on top of the committed state.

    A fresh context is handed to every policy invocation, so staged values
    never outlive the invocation that set them.
    """

    def __init__(self, info: SysInfo, base: ActuationState):
        self.info = info
        self.base = base
        self.staged = ActuationState()

    def try_actuate(self, rid: ResourceId, kind: ActuatorKind, value) -> None:
        value = check_value(self.info, rid, kind, value, self.base.task_map.keys())
        _write(self.staged, rid, kind, value)

    def try_actuation_val(self, rid: ResourceId, kind: ActuatorKind):
        actuation_ranges(self.info, rid, kind, self.base.task_map.keys())
        if kind is ActuatorKind.FREQUENCY and rid.index in self.staged.freq_ghz:
            return self.staged.freq_ghz[rid.index]
        if kind is ActuatorKind.TASK_CORE_MAP and rid.index in self.staged.task_map:
            return self.staged.task_map[rid.index]
        return _read(self.base, rid, kind)

    def clear(self) -> None:
        self.staged = ActuationState()

    @property
    def empty(self) -> bool:
        return not self.staged.freq_ghz and not self.staged.task_map

    def resolved(self) -> ActuationState:
        """Committed state with the overlay applied, as an independent copy."""
        out = self.base.copy()
        out.freq_ghz.update(self.staged.freq_ghz)
        # staged mappings for tasks that have since terminated are dropped
        out.task_map.update((t, c) for t, c in self.staged.task_map.items() if t in out.task_map)
        return out
