"""Single-run simulation driver and cross-seed aggregation.

``simulate`` executes one (pattern, policy, schedule, seed) run over a full
refresh window, maintaining the per-row disturbance ledger, the RAA counter
that triggers scheduled mitigations, and the mitigation bookkeeping.

Two interchangeable kernels exist: a compiled C extension (built from
``_speed.pyx``) and a pure-Python fallback. They implement the identical
state machine and random-draw order, so results are bit-equal; the compiled
one is picked automatically at import when available.

Disturbance semantics (the most consequential modeling choice): a row's
running counter resets only when a mitigation selects that row as the
aggressor. Victim rows refreshed inside another aggressor's blast radius do
not reset their own counters, and the residual count at the end of the
window still contributes to the per-row maximum.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field

from . import policies as pol
from .dram import DramTimings, MitigationSchedule, derive_budgets, rfm_threshold
from .patterns import AttackPattern
from .policies import PolicySpec, PolicyState
from .rng import RngStream, stream_seed
from .tracker import EvictionRule

try:
    from . import _speed

    HAVE_COMPILED_KERNEL = True
except ImportError:  # pragma: no cover - depends on build environment
    _speed = None
    HAVE_COMPILED_KERNEL = False

if os.environ.get("HAMMERSIM_PURE"):  # pragma: no cover - env-dependent
    HAVE_COMPILED_KERNEL = False

_POLICY_IDS = {"baseline": 0, "proteas": 1, "pmss": 2, "dsac": 3, "prohit": 4, "para": 5, "graphene": 6}
_EVICTION_IDS = {"lfu": 0, "lru": 1, "random": 2, "bip": 3}


@dataclass(frozen=True)
class SimConfig:
    policy: PolicySpec
    pattern: AttackPattern
    timings: DramTimings = field(default_factory=DramTimings)
    schedule: MitigationSchedule = field(default_factory=MitigationSchedule)
    tracker_capacity: int = 16
    master_seed: int = 0
    seed_index: int = 0

    def __post_init__(self):
        if self.tracker_capacity < 1:
            raise ValueError("tracker_capacity must be >= 1")


@dataclass(frozen=True)
class SimResult:
    max_disturbance: int
    avg_disturbance: float
    mitigations_issued: int
    empty_mitigation_slots: int
    scheduled_slots: int
    mean_tracker_occupancy: float
    extra_activation_fraction: float
    total_activations: int


@dataclass(frozen=True)
class SweepStats:
    mean: float
    std: float
    ci95: float
    n: int


def _pattern_tag(pattern: AttackPattern) -> int:
    digest = hashlib.blake2b(pattern.pattern_id.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _local_cycle(pattern: AttackPattern) -> tuple[list[int], int]:
    """Map the cycle's row ids onto dense local indices (targets first)."""
    index = {}
    for r in pattern.target_rows + pattern.decoy_rows:
        index[r] = len(index)
    return [index[r] for r in pattern.cycle], len(index)


def _policy_kernel_params(spec: PolicySpec) -> tuple[int, float, float, int, float, int, int, int]:
    """Collapse a PolicySpec into the scalar arguments both kernels share:
    (policy_id, p1, p2, eviction_id, bip_eps, hot_cap, cold_cap, graphene_th)."""
    ev = getattr(spec, "eviction", EvictionRule("lfu"))
    ev_id = _EVICTION_IDS[ev.kind]
    eps = ev.epsilon
    if isinstance(spec, pol.Baseline):
        return 0, 0.0, 0.0, ev_id, eps, 0, 0, 0
    if isinstance(spec, pol.Proteas):
        return 1, spec.sampling_p, 0.0, ev_id, eps, 0, 0, 0
    if isinstance(spec, pol.Pmss):
        return 2, spec.sampling_p, 0.0, ev_id, eps, 0, 0, 0
    if isinstance(spec, pol.Dsac):
        return 3, 0.0, spec.p_floor, 0, eps, 0, 0, 0
    if isinstance(spec, pol.Prohit):
        return 4, spec.promote_p, 0.0, 0, eps, spec.hot_capacity, spec.cold_capacity, 0
    if isinstance(spec, pol.Para):
        return 5, spec.mitigate_p, 0.0, 0, eps, 0, 0, 0
    if isinstance(spec, pol.Graphene):
        return 6, 0.0, 0.0, 0, eps, 0, 0, spec.mitigation_threshold
    raise TypeError(f"unknown policy spec: {spec!r}")


def _run_kernel(config: SimConfig, use_compiled: bool | None):
    if use_compiled is None:
        use_compiled = HAVE_COMPILED_KERNEL
    budgets = derive_budgets(config.timings)
    rfm_th = rfm_threshold(budgets, config.schedule.mitigations_per_trefi)
    cycle, footprint = _local_cycle(config.pattern)
    tag = _pattern_tag(config.pattern)
    seeds = {
        purpose: stream_seed(config.master_seed, purpose, tag, config.seed_index)
        for purpose in ("sampling", "eviction", "para")
    }

    if use_compiled:
        if not HAVE_COMPILED_KERNEL:
            raise RuntimeError("compiled kernel requested but not available")
        pid, p1, p2, ev_id, eps, hot, cold, gth = _policy_kernel_params(config.policy)
        import numpy as np

        mx = np.zeros(footprint, dtype=np.int64)
        tot = np.zeros(footprint, dtype=np.int64)
        mitigations, empty, slots, occ_sum = _speed.simulate_kernel(
            budgets.acts_per_trefw,
            budgets.acts_per_trefi,
            rfm_th,
            np.asarray(cycle, dtype=np.int32),
            1 if config.pattern.aligned else 0,
            pid,
            p1,
            p2,
            ev_id,
            eps,
            config.tracker_capacity,
            hot,
            cold,
            gth,
            seeds["sampling"],
            seeds["eviction"],
            seeds["para"],
            mx,
            tot,
        )
        mx_list = mx.tolist()
        tot = tot.tolist()
    else:
        mitigations, empty, slots, occ_sum, mx_list, tot = _simulate_py(
            budgets.acts_per_trefw, budgets.acts_per_trefi, rfm_th, cycle, footprint, config, seeds
        )
        tot = list(tot)

    return mitigations, empty, slots, occ_sum, mx_list, tot, budgets


def simulate(config: SimConfig, use_compiled: bool | None = None) -> SimResult:
    """Run one full-tREFW simulation. ``use_compiled`` forces a kernel
    choice; by default the compiled kernel is used when available."""
    mitigations, empty, slots, occ_sum, mx_list, _, budgets = _run_kernel(config, use_compiled)
    footprint = len(mx_list)
    total = budgets.acts_per_trefw
    return SimResult(
        max_disturbance=max(mx_list),
        avg_disturbance=sum(mx_list) / footprint,
        mitigations_issued=mitigations,
        empty_mitigation_slots=empty,
        scheduled_slots=slots,
        mean_tracker_occupancy=occ_sum / slots if slots else 0.0,
        extra_activation_fraction=mitigations * 2 * config.schedule.blast_radius / total,
        total_activations=total,
    )


def row_activation_totals(config: SimConfig, use_compiled: bool | None = None) -> list[int]:
    """Per-row lifetime activation counts (the disturbance ledger's
    conservation check: these must sum to acts_per_trefw)."""
    return _run_kernel(config, use_compiled)[5]


def _simulate_py(total_acts, acts_per_trefi, rfm_th, cycle, footprint, config, seeds):
    """Pure-Python kernel; mirrors the compiled one draw-for-draw."""
    sampling = RngStream(seeds["sampling"])
    eviction = RngStream(seeds["eviction"])
    para = RngStream(seeds["para"])

    state = PolicyState(config.policy, config.tracker_capacity)
    cur = [0] * footprint
    mx = [0] * footprint
    tot = [0] * footprint
    period = len(cycle)
    aligned = config.pattern.aligned

    raa = 0
    tp = 0  # position within the current tREFI
    phase = 0  # unaligned cycle position
    mitigations = 0
    empty = 0
    slots = 0
    occ_sum = 0

    for g in range(total_acts):
        li = cycle[tp % period] if aligned else cycle[phase]
        phase += 1
        if phase == period:
            phase = 0
        c = cur[li] + 1
        cur[li] = c
        tot[li] += 1
        if c > mx[li]:
            mx[li] = c

        hit_row = pol.on_activation(state, li, sampling, eviction, para, g)
        if hit_row is not None:
            cur[hit_row] = 0
            mitigations += 1

        raa += 1
        if raa == rfm_th:
            raa = 0
            slots += 1
            occ_sum += state.occupancy
            victim = pol.on_scheduled_mitigation(state)
            if victim is None:
                empty += 1
            else:
                mitigations += 1
                cur[victim] = 0

        tp += 1
        if tp == acts_per_trefi:
            tp = 0

    return mitigations, empty, slots, occ_sum, mx, tot


def aggregate(values: list[float]) -> SweepStats:
    """Mean, sample std, and 95% CI (1.96 s/sqrt(n)) over per-seed values."""
    n = len(values)
    if n == 0:
        raise ValueError("aggregate requires at least one value")
    mean = sum(values) / n
    if n == 1:
        return SweepStats(mean=mean, std=0.0, ci95=0.0, n=1)
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    std = math.sqrt(var)
    return SweepStats(mean=mean, std=std, ci95=1.96 * std / math.sqrt(n), n=n)
