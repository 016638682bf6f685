from __future__ import annotations

import enum

from ..errors import InvalidPeriod
from ..platform import ActuatorKind, task


class Mode(enum.Enum):
    ACTIVE = "Active"
    MODEL_ONLY = "ModelOnly"


class Policy:
    """Base class for resource-management policies.

    Subclasses set ``period`` (seconds between invocations, which is also the
    length of the policy's sensing window) and implement ``execute(env)``.
    A policy that can stand in as a model for reflective queries lists the
    actuators it drives in ``models`` as ``(ActuatorKind, index or None)``.
    """

    name: str = "policy"
    period: float = 0.05
    models: tuple = ()
    mode: Mode = Mode.ACTIVE

    def __init__(self, name: str | None = None, period: float | None = None):
        if name is not None:
            self.name = name
        if period is not None:
            self.period = period
        if not self.period > 0:
            raise InvalidPeriod(f"policy period must be positive, got {self.period}")

    def execute(self, env) -> None:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, period={self.period})"


def least_loaded_core(env, type_index: int, exclude_task: int | None = None,
                      loads: dict[int, int] | None = None) -> int | None:
    """Core of the given type hosting the fewest tasks (lowest id on ties)."""
    cores = env.sys_info.cores_of_type(type_index)
    if not cores:
        return None
    if loads is None:
        loads = core_loads(env, exclude_task)
    return min(cores, key=lambda c: (loads.get(c, 0), c))


def core_loads(env, exclude_task: int | None = None) -> dict[int, int]:
    loads: dict[int, int] = {}
    for t in env.tasks():
        if t == exclude_task:
            continue
        c = env.actuation_val(task(t), ActuatorKind.TASK_CORE_MAP)
        loads[c] = loads.get(c, 0) + 1
    return loads
