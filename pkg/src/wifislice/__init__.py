"""Discrete-event simulator of uplink Wi-Fi network slicing with per-slice radio control."""

from .runner import (
    RunConfig,
    RunResult,
    run_experiment,
    run_sweep,
    summarize,
    sweep_plan,
)
from .scenario import Scenario, ScenarioParams, build_scenario

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "RunResult",
    "Scenario",
    "ScenarioParams",
    "build_scenario",
    "run_experiment",
    "run_sweep",
    "summarize",
    "sweep_plan",
    "__version__",
]
