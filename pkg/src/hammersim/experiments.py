"""Sweep orchestration and the headline studies.

A "suite run" evaluates one policy configuration against a pattern list
over several seeds and aggregates per pattern; the headline statistic is
``suite_max``: the maximum over patterns of the per-pattern seed-mean of
max disturbance (the worst attack pattern, with seed noise averaged out).
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dram import DramTimings, MitigationSchedule
from .engine import SimConfig, SweepStats, aggregate, simulate
from .patterns import AttackPattern, standard_suite
from .policies import Baseline, Dsac, Para, PolicySpec, Prohit, Proteas
from .tracker import EvictionRule

# Mitigation probabilities giving PARA one mitigation per rfm_threshold
# activations in expectation, per mitigations-per-tREFI level.
PARA_P_PER_K = {1: 0.006, 2: 0.012, 4: 0.025, 8: 0.05}

# Default sampling-probability grid; covers every reported sweep minimum.
DEFAULT_P_GRID = (0.001, 0.003, 0.006, 0.01, 0.02, 0.03, 0.05, 0.10, 0.20, 0.50, 1.0)

SWEEP_AXES = ("sampling_p", "tracker_size", "mitigations_per_trefi", "eviction_rule", "policy")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    axis_values: tuple
    policy: PolicySpec = field(default_factory=Proteas)
    schedule: MitigationSchedule = field(default_factory=MitigationSchedule)
    timings: DramTimings = field(default_factory=DramTimings)
    tracker_capacity: int = 16
    patterns: tuple[AttackPattern, ...] = ()
    seeds: int = 100
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        if not self.axis_values:
            raise ValueError("axis_values must be non-empty")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if not self.patterns:
            object.__setattr__(self, "patterns", tuple(standard_suite()))


@dataclass(frozen=True)
class PatternStats:
    pattern: AttackPattern
    max_disturbance: SweepStats
    avg_disturbance: SweepStats
    mitigations: SweepStats
    occupancy: SweepStats
    extra_activation_fraction: float


@dataclass(frozen=True)
class SweepRow:
    axis_value: object
    policy: PolicySpec
    schedule: MitigationSchedule
    tracker_capacity: int
    seeds: int
    master_seed: int
    per_pattern: tuple[PatternStats, ...]
    suite_max: float
    suite_max_ci: float
    suite_avg: float
    suite_avg_ci: float


def _run_one(config: SimConfig):
    r = simulate(config)
    return (
        r.max_disturbance,
        r.avg_disturbance,
        r.mitigations_issued,
        r.mean_tracker_occupancy,
        r.extra_activation_fraction,
    )


def run_suite(
    policy: PolicySpec,
    patterns,
    seeds: int,
    schedule: MitigationSchedule | None = None,
    tracker_capacity: int = 16,
    master_seed: int = 0,
    timings: DramTimings | None = None,
    workers: int = 1,
) -> list[PatternStats]:
    """Aggregate per-pattern stats over ``seeds`` independent runs each."""
    schedule = schedule or MitigationSchedule()
    timings = timings or DramTimings()
    configs = [
        SimConfig(
            policy=policy,
            pattern=pattern,
            timings=timings,
            schedule=schedule,
            tracker_capacity=tracker_capacity,
            master_seed=master_seed,
            seed_index=s,
        )
        for pattern in patterns
        for s in range(seeds)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_run_one, configs, chunksize=max(1, len(configs) // (8 * workers))))
    else:
        flat = [_run_one(c) for c in configs]

    out = []
    for pi, pattern in enumerate(patterns):
        runs = flat[pi * seeds : (pi + 1) * seeds]
        out.append(
            PatternStats(
                pattern=pattern,
                max_disturbance=aggregate([r[0] for r in runs]),
                avg_disturbance=aggregate([r[1] for r in runs]),
                mitigations=aggregate([r[2] for r in runs]),
                occupancy=aggregate([r[3] for r in runs]),
                extra_activation_fraction=runs[0][4],
            )
        )
    return out


def suite_max(per_pattern: list[PatternStats]) -> tuple[float, float]:
    worst = max(per_pattern, key=lambda ps: ps.max_disturbance.mean)
    return worst.max_disturbance.mean, worst.max_disturbance.ci95


def suite_avg(per_pattern: list[PatternStats]) -> tuple[float, float]:
    worst = max(per_pattern, key=lambda ps: ps.avg_disturbance.mean)
    return worst.avg_disturbance.mean, worst.avg_disturbance.ci95


def _apply_axis(spec: SweepSpec, value):
    policy, schedule, capacity = spec.policy, spec.schedule, spec.tracker_capacity
    if spec.axis == "sampling_p":
        policy = dataclasses.replace(policy, sampling_p=value)
    elif spec.axis == "tracker_size":
        capacity = int(value)
    elif spec.axis == "mitigations_per_trefi":
        schedule = dataclasses.replace(schedule, mitigations_per_trefi=int(value))
    elif spec.axis == "eviction_rule":
        rule = value if isinstance(value, EvictionRule) else EvictionRule(value)
        policy = dataclasses.replace(policy, eviction=rule)
    else:  # policy
        policy = value
    return policy, schedule, capacity


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    rows = []
    for value in spec.axis_values:
        policy, schedule, capacity = _apply_axis(spec, value)
        per_pattern = run_suite(
            policy,
            spec.patterns,
            spec.seeds,
            schedule=schedule,
            tracker_capacity=capacity,
            master_seed=spec.master_seed,
            timings=spec.timings,
            workers=spec.workers,
        )
        smax, smax_ci = suite_max(per_pattern)
        savg, savg_ci = suite_avg(per_pattern)
        rows.append(
            SweepRow(
                axis_value=value,
                policy=policy,
                schedule=schedule,
                tracker_capacity=capacity,
                seeds=spec.seeds,
                master_seed=spec.master_seed,
                per_pattern=tuple(per_pattern),
                suite_max=smax,
                suite_max_ci=smax_ci,
                suite_avg=savg,
                suite_avg_ci=savg_ci,
            )
        )
    return rows


def resolve_scheme(scheme, k: int) -> PolicySpec:
    """Turn a scheme entry (PolicySpec or shorthand name) into a concrete
    policy for a given mitigations-per-tREFI level."""
    if isinstance(scheme, str):
        name = scheme.lower()
        if name == "baseline":
            return Baseline()
        if name == "proteas":
            return Proteas()
        if name == "dsac":
            return Dsac()
        if name == "prohit":
            return Prohit()
        if name == "para":
            return Para(mitigate_p=PARA_P_PER_K[k])
        raise ValueError(f"unknown scheme shorthand: {scheme}")
    return scheme


def compare_schemes(schemes, k_values, patterns, seeds, master_seed: int = 0, workers: int = 1):
    """Suite-level max/avg disturbance per (scheme, k)."""
    table = []
    for scheme in schemes:
        for k in k_values:
            policy = resolve_scheme(scheme, k)
            per_pattern = run_suite(
                policy,
                patterns,
                seeds,
                schedule=MitigationSchedule(mitigations_per_trefi=k),
                master_seed=master_seed,
                workers=workers,
            )
            smax, smax_ci = suite_max(per_pattern)
            savg, savg_ci = suite_avg(per_pattern)
            table.append(
                {
                    "scheme": policy.name,
                    "policy": policy,
                    "k": k,
                    "suite_max": smax,
                    "suite_max_ci": smax_ci,
                    "suite_avg": savg,
                    "suite_avg_ci": savg_ci,
                }
            )
    return table


def analytic_sampling_rate(mitigations_per_act: float, miss_rate: float) -> float:
    """Sampling probability at which insertions balance mitigations:
    S = M / miss_rate."""
    if mitigations_per_act <= 0:
        raise ValueError("mitigations_per_act must be positive")
    if not 0.0 < miss_rate <= 1.0:
        raise ValueError("miss_rate must be in (0, 1]")
    return mitigations_per_act / miss_rate


def default_workers() -> int:
    env = os.environ.get("HAMMERSIM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
