"""Task-to-core mapping: the reflective greedy mapper and the GTS threshold baseline."""

from __future__ import annotations

import logging

from ..errors import NoForecast, UnknownResource
from ..platform import SYSTEM, ActuatorKind, SensorKind, task
from .base import Policy, core_loads, least_loaded_core

log = logging.getLogger(__name__)

MAP = ActuatorKind.TASK_CORE_MAP


class TaskMappingPolicy(Policy):
    """Greedy reflective mapper.

    Tasks are visited once per epoch, busiest first (last-window
    instructions). For each task the least-loaded core of every core type is
    tried as a hypothetical destination and scored by predicted system
    IPS per watt; the best one is committed only if it beats staying put by
    more than ``hysteresis``. Predictions run the registered models, so a
    DVFS model reacts to every hypothetical move.
    """

    name = "task_mapping"
    period = 0.5

    def __init__(self, name=None, period=None, hysteresis: float = 0.01):
        super().__init__(name, period)
        self.hysteresis = hysteresis

    def score(self, env) -> float:
        ips = env.sense_if(SYSTEM, SensorKind.IPS)
        power = env.sense_if(SYSTEM, SensorKind.POWER_WATTS)
        return ips / power if power > 0 else 0.0

    def _order(self, env) -> list[int]:
        def key(t):
            try:
                n = env.sense(task(t), SensorKind.INSTRUCTIONS_RETIRED)
            except UnknownResource:
                n = 0
            return (-n, t)

        return sorted(env.tasks(), key=key)

    def execute(self, env) -> None:
        info = env.sys_info
        for t in self._order(env):
            rid = task(t)
            env.reset()
            try:
                stay = self.score(env)
            except NoForecast:
                log.debug("%s: no forecast yet", self.name)
                return
            current = env.actuation_val(rid, MAP)
            loads = core_loads(env, exclude_task=t)
            best_core, best = None, stay
            for type_index in range(len(info.core_types)):
                cand = least_loaded_core(env, type_index, loads=loads)
                if cand is None or cand == current:
                    continue
                env.reset()
                env.try_actuate(rid, MAP, cand)
                s = self.score(env)
                if s > best:
                    best_core, best = cand, s
            env.reset()
            if best_core is not None and best > stay * (1.0 + self.hysteresis):
                env.actuate(rid, MAP, best_core)


class GTSPolicy(Policy):
    """Load-threshold migration between the fastest and slowest core types.

    A task whose share of its core over the last window reaches ``up`` while
    on a little core moves to the least-loaded big core; one at or below
    ``down`` on a big core moves to the least-loaded little core. There is
    no admission control: a busy big cluster still receives the task.
    """

    name = "gts"
    period = 0.1

    def __init__(self, name=None, period=None, up: float = 0.9, down: float = 0.3):
        super().__init__(name, period)
        self.up = up
        self.down = down

    def execute(self, env) -> None:
        info = env.sys_info
        by_speed = sorted(range(len(info.core_types)), key=lambda i: (info.core_types[i].cpi_scale, i))
        big, little = by_speed[0], by_speed[-1]
        if info.core_types[big].cpi_scale == info.core_types[little].cpi_scale:
            return
        length = env.window_length
        loads = core_loads(env)
        for t in env.tasks():
            rid = task(t)
            try:
                share = env.sense(rid, SensorKind.BUSY_TIME_SEC) / length
            except UnknownResource:
                continue
            current = env.actuation_val(rid, MAP)
            ctype = info.type_index_of_core(current)
            if ctype == little and share >= self.up:
                target_type = big
            elif ctype == big and share <= self.down:
                target_type = little
            else:
                continue
            loads[current] -= 1
            target = least_loaded_core(env, target_type, loads=loads)
            loads[target] = loads.get(target, 0) + 1
            env.actuate(rid, MAP, target)
