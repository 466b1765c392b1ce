"""Graph workload profiling, system-configuration advice and a GPU memory simulator."""

from .advisor import (
    AlgoProps, Coherence, Consistency, DesignSpace, Direction, Side, SystemConfig, Traversal,
    algo_properties, default_registry, load_registry, parse_config, predict, predict_full,
    predict_partial,
)
from .graph import CsrGraph, GraphFormatError, RawEdges, build_graph, degree_stats, load_graph
from .kernels import AlgoParams, execute, kernel_spec, reference_result
from .memsim import SimParams, SimReport, default_config_set, simulate, sweep
from .metrics import GraphProfile, HardwareConfig, Level, Thresholds, profile

__version__ = "0.1.0"

__all__ = [
    "AlgoParams", "AlgoProps", "Coherence", "Consistency", "CsrGraph", "DesignSpace",
    "Direction", "GraphFormatError", "GraphProfile", "HardwareConfig", "Level", "RawEdges",
    "Side", "SimParams", "SimReport", "SystemConfig", "Thresholds", "Traversal",
    "algo_properties", "build_graph", "default_config_set", "default_registry", "degree_stats",
    "execute", "kernel_spec", "load_graph", "load_registry", "parse_config", "predict",
    "predict_full", "predict_partial", "profile", "reference_result", "simulate", "sweep",
]
