"""Deterministic rover simulator with vitals-based health monitoring and
adaptive-threshold fault detection."""

__version__ = "0.1.0"

from .config import ScenarioConfig, from_dict, parse_config
from .scenario import builtin_scenarios, run_scenario, summarize

__all__ = [
    "ScenarioConfig",
    "builtin_scenarios",
    "from_dict",
    "parse_config",
    "run_scenario",
    "summarize",
]
