"""Exemplar policies and the name registry used by manager configs."""

from .base import Mode, Policy, core_loads, least_loaded_core
from .dvfs import (DvfsDecision, MaxPerformancePolicy, MinPowerPolicy, OndemandGovernor,
                   SimpleDVFSPolicy, ips_per_watt, ondemand_target)
from .mapping import GTSPolicy, TaskMappingPolicy

POLICY_TYPES: dict[str, type[Policy]] = {
    "simple_dvfs": SimpleDVFSPolicy,
    "ondemand": OndemandGovernor,
    "task_mapping": TaskMappingPolicy,
    "gts": GTSPolicy,
    "min_power": MinPowerPolicy,
    "max_performance": MaxPerformancePolicy,
}


def create_policy(type_name: str, name: str | None = None, period: float | None = None,
                  **params) -> Policy:
    try:
        cls = POLICY_TYPES[type_name]
    except KeyError:
        raise KeyError(f"unknown policy type {type_name!r}; known: {sorted(POLICY_TYPES)}") from None
    return cls(name=name, period=period, **params)


__all__ = [
    "DvfsDecision", "GTSPolicy", "MaxPerformancePolicy", "MinPowerPolicy", "Mode",
    "OndemandGovernor", "POLICY_TYPES", "Policy", "SimpleDVFSPolicy", "TaskMappingPolicy",
    "core_loads", "create_policy", "ips_per_watt", "least_loaded_core", "ondemand_target",
]
