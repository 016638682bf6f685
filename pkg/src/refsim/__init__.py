"""Reflective resource management for heterogeneous multicores, with a
trace-driven platform simulator."""

from .errors import *  # noqa: F401,F403
from .manager import PolicyManager, Scenario, Trigger
from .platform import (SYSTEM, ActuatorKind, ResourceId, ResourceKind, SensorKind, SysInfo,
                       core, domain, load_platform, task)
from .policies import Policy, create_policy
from .report import MetricsReport
from .simulator import Simulator, run
from .trace import TaskTrace, load_trace

__version__ = "0.1.0"
