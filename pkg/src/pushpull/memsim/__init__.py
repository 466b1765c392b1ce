"""Cycle-approximate GPU memory-hierarchy simulator for push/pull graph kernels."""

from .params import SimConfigError, SimParams
from .report import BREAKDOWN_HEADER, COUNTERS, STALL_CLASSES, SimReport, breakdown_csv
from .simulate import (
    LitmusResult, check_compatible, default_config_set, litmus, simulate, sweep,
)

__all__ = [
    "BREAKDOWN_HEADER", "COUNTERS", "STALL_CLASSES", "LitmusResult", "SimConfigError",
    "SimParams", "SimReport", "breakdown_csv", "check_compatible", "default_config_set",
    "litmus", "simulate", "sweep",
]
