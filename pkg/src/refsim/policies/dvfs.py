"""Frequency policies: the reflective efficiency governor and simple baselines."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from ..errors import NoForecast
from ..platform import ActuatorKind, SensorKind, core, domain
from .base import Policy

log = logging.getLogger(__name__)

FREQ = ActuatorKind.FREQUENCY


def ips_per_watt(ips: float, power: float) -> float:
    return ips / power if power > 0 else 0.0


@dataclass(frozen=True)
class DvfsDecision:
    time: float
    domain: int
    freq: float
    ips: float
    power: float
    table: tuple[tuple[float, float], ...]  # (freq, efficiency) for every candidate


class SimpleDVFSPolicy(Policy):
    """Pick, per domain, the frequency with the best predicted efficiency.

    Every available frequency is staged and the domain's IPS and power over
    the next window are predicted; the argmax is committed, ties going to
    the lower frequency. Domains are visited in id order, each one seeing
    the decisions already committed for the previous ones.
    """

    name = "simple_dvfs"
    period = 0.05

    def __init__(self, name=None, period=None,
                 efficiency: Callable[[float, float], float] = ips_per_watt):
        super().__init__(name, period)
        self.efficiency = efficiency
        self.decisions: list[DvfsDecision] = []

    def evaluate(self, env, dom: int, freq: float) -> tuple[float, float]:
        """Predicted (IPS, power) of domain ``dom`` if it ran at ``freq``."""
        rid = domain(dom)
        env.reset()
        env.try_actuate(rid, FREQ, freq)
        pred = env.predict()
        return pred.value(rid, SensorKind.IPS), pred.value(rid, SensorKind.POWER_WATTS)

    def execute(self, env) -> None:
        for d in env.sys_info.freq_domains:
            rid = domain(d.id)
            best = None
            table = []
            for f in env.actuation_ranges(rid, FREQ):
                try:
                    ips, power = self.evaluate(env, d.id, f)
                except NoForecast:
                    log.debug("%s: no forecast yet, keeping current frequencies", self.name)
                    env.reset()
                    return
                eff = self.efficiency(ips, power)
                table.append((f, eff))
                if best is None or eff > best[1]:
                    best = (f, eff, ips, power)
            env.reset()
            env.actuate(rid, FREQ, best[0])
            self.decisions.append(DvfsDecision(env.now, d.id, best[0], best[2], best[3], tuple(table)))


def ondemand_target(u_max: float, f_cur: float, freqs, up_threshold: float = 0.8) -> float:
    """Ondemand-style rule: jump to f_max when busy, else the slowest frequency
    that keeps utilization under the threshold at the current load."""
    if u_max >= up_threshold:
        return freqs[-1]
    for f in freqs:
        if u_max * f_cur <= up_threshold * f:
            return f
    return freqs[-1]


class OndemandGovernor(Policy):
    """Load-driven governor in the style of Linux ondemand.

    Works both as a live policy and as a model registered for reflective
    queries; in the latter case it only stages frequencies.
    """

    name = "ondemand"
    period = 0.05
    models = ((FREQ, None),)

    def __init__(self, name=None, period=None, up_threshold: float = 0.8):
        super().__init__(name, period)
        self.up_threshold = up_threshold

    def execute(self, env) -> None:
        length = env.window_length
        for d in env.sys_info.freq_domains:
            rid = domain(d.id)
            u_max = max(env.sense(core(c), SensorKind.BUSY_TIME_SEC) / length for c in d.core_ids)
            f_cur = env.try_actuation_val(rid, FREQ)
            target = ondemand_target(u_max, f_cur, env.actuation_ranges(rid, FREQ), self.up_threshold)
            if target == f_cur:
                continue
            if env.is_model:
                env.try_actuate(rid, FREQ, target)
            else:
                env.actuate(rid, FREQ, target)


class PinnedFrequencyPolicy(Policy):
    """Hold every domain at its lowest or highest frequency."""

    models = ((FREQ, None),)

    def __init__(self, name=None, period=None, pin: str = "min"):
        super().__init__(name, period)
        if pin not in ("min", "max"):
            raise ValueError("pin must be 'min' or 'max'")
        self.pin = pin

    def execute(self, env) -> None:
        for d in env.sys_info.freq_domains:
            rid = domain(d.id)
            freqs = env.actuation_ranges(rid, FREQ)
            target = freqs[0] if self.pin == "min" else freqs[-1]
            if env.try_actuation_val(rid, FREQ) == target:
                continue
            if env.is_model:
                env.try_actuate(rid, FREQ, target)
            else:
                env.actuate(rid, FREQ, target)


class MinPowerPolicy(PinnedFrequencyPolicy):
    """Pin every domain to its lowest frequency."""

    name = "min_power"
    period = 0.05

    def __init__(self, name=None, period=None):
        super().__init__(name, period, pin="min")


class MaxPerformancePolicy(PinnedFrequencyPolicy):
    """Pin every domain to its highest frequency."""

    name = "max_performance"
    period = 0.05

    def __init__(self, name=None, period=None):
        super().__init__(name, period, pin="max")
