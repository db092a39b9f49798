"""Trace-driven simulator of in-DRAM Rowhammer aggressor-row trackers."""

from .dram import (
    DerivedBudgets,
    DramTimings,
    MitigationSchedule,
    derive_budgets,
    graphene_capacity,
    rfm_threshold,
    storage_bytes,
    victim_set,
)
from .engine import HAVE_COMPILED_KERNEL, SimConfig, SimResult, aggregate, simulate
from .patterns import AttackPattern, nonuniform_pattern, standard_suite, trace_pattern, uniform_pattern
from .policies import Baseline, Dsac, Graphene, Para, Pmss, PolicySpec, Prohit, Proteas
from .tracker import BIP, LFU, LRU, RANDOM, EvictionRule, TrackerState

__version__ = "0.1.0"

__all__ = [
    "AttackPattern",
    "BIP",
    "Baseline",
    "DerivedBudgets",
    "DramTimings",
    "Dsac",
    "EvictionRule",
    "Graphene",
    "HAVE_COMPILED_KERNEL",
    "LFU",
    "LRU",
    "MitigationSchedule",
    "Para",
    "Pmss",
    "PolicySpec",
    "Prohit",
    "Proteas",
    "RANDOM",
    "SimConfig",
    "SimResult",
    "TrackerState",
    "aggregate",
    "derive_budgets",
    "graphene_capacity",
    "nonuniform_pattern",
    "rfm_threshold",
    "simulate",
    "standard_suite",
    "storage_bytes",
    "trace_pattern",
    "uniform_pattern",
    "victim_set",
]
