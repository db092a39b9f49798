"""Mitigation schemes built on the aggressor-row tracker.

Seven schemes are modeled:

* ``Baseline`` — deterministic: every activation consults the tracker and
  every miss inserts (LFU eviction by default). This is the thrash-prone
  reference point.
* ``Proteas`` — request-stream sampling: an activation consults the tracker
  only with probability ``sampling_p``; random replacement by default.
* ``Pmss`` — miss-stream sampling: all activations consult, but a miss on a
  full tracker inserts only with probability ``sampling_p``.
* ``Dsac`` — like Pmss, but the when-full insertion probability decays as
  max(p_floor, 1/(1+min_count)). The decay law is our model of the
  published behavior (the real device's law is not public) and is meant to
  reproduce the stated 1..0.05 dynamic range.
* ``Prohit`` — two-table tracker (hot/cold) with probabilistic promotion
  from cold to hot and FIFO cold eviction; table sizes and promote_p are
  likewise modeled approximations.
* ``Para`` — trackerless: each activation triggers an immediate mitigation
  of that row with probability ``mitigate_p``.
* ``Graphene`` — Misra-Gries counting with threshold-triggered (immediate)
  mitigation at trh/2; serves as a secure reference oracle.

``on_activation``/``on_scheduled_mitigation`` form the per-activation state
machine used by the pure-Python kernel; the compiled kernel mirrors them
draw-for-draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import tracker as tk
from .rng import RngStream
from .tracker import EvictionRule, TrackerState

PROHIT_HOT_CAPACITY = 4
PROHIT_COLD_CAPACITY = 12
PROHIT_PROMOTE_P = 0.1
DSAC_P_FLOOR = 0.05


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class Baseline:
    eviction: EvictionRule = field(default_factory=lambda: EvictionRule("lfu"))
    name = "baseline"


@dataclass(frozen=True)
class Proteas:
    sampling_p: float = 0.01
    eviction: EvictionRule = field(default_factory=lambda: EvictionRule("random"))
    name = "proteas"

    def __post_init__(self):
        _check_prob("sampling_p", self.sampling_p)


@dataclass(frozen=True)
class Pmss:
    sampling_p: float = 0.01
    eviction: EvictionRule = field(default_factory=lambda: EvictionRule("lfu"))
    name = "pmss"

    def __post_init__(self):
        _check_prob("sampling_p", self.sampling_p)


@dataclass(frozen=True)
class Dsac:
    p_floor: float = DSAC_P_FLOOR
    name = "dsac"

    def __post_init__(self):
        _check_prob("p_floor", self.p_floor)


@dataclass(frozen=True)
class Prohit:
    hot_capacity: int = PROHIT_HOT_CAPACITY
    cold_capacity: int = PROHIT_COLD_CAPACITY
    promote_p: float = PROHIT_PROMOTE_P
    name = "prohit"

    def __post_init__(self):
        if self.hot_capacity < 1 or self.cold_capacity < 1:
            raise ValueError("prohit table capacities must be >= 1")
        _check_prob("promote_p", self.promote_p)


@dataclass(frozen=True)
class Para:
    mitigate_p: float = 0.006
    name = "para"

    def __post_init__(self):
        _check_prob("mitigate_p", self.mitigate_p)


@dataclass(frozen=True)
class Graphene:
    trh: int = 500
    name = "graphene"

    def __post_init__(self):
        if self.trh < 2:
            raise ValueError("trh must be >= 2")

    @property
    def mitigation_threshold(self) -> int:
        return -(-self.trh // 2)


PolicySpec = Union[Baseline, Proteas, Pmss, Dsac, Prohit, Para, Graphene]


def dsac_evict_prob(min_count: int, p_floor: float = DSAC_P_FLOOR) -> float:
    """Modeled insertion probability for a full DSAC tracker: starts at 1
    for an all-zero tracker and decays with the minimum resident count,
    floored at p_floor."""
    if min_count < 0:
        raise ValueError("min_count must be >= 0")
    return max(p_floor, 1.0 / (1.0 + min_count))


class PolicyState:
    """Per-run mutable state for one policy instance."""

    def __init__(self, spec: PolicySpec, capacity: int):
        self.spec = spec
        if isinstance(spec, Prohit):
            self.hot = TrackerState(spec.hot_capacity)
            self.cold = TrackerState(spec.cold_capacity)
            self.tracker = None
        elif isinstance(spec, Para):
            self.tracker = None
        else:
            self.tracker = TrackerState(capacity)

    @property
    def occupancy(self) -> int:
        if isinstance(self.spec, Prohit):
            return self.hot.occupancy + self.cold.occupancy
        if self.tracker is None:
            return 0
        return self.tracker.occupancy


def _min_valid_count(t: TrackerState) -> int:
    return min(c for c, v in zip(t.counts, t.valid) if v)


def on_activation(
    state: PolicyState,
    row: int,
    sampling: RngStream,
    eviction: RngStream,
    para: RngStream,
    now: int,
) -> Optional[int]:
    """Apply one activation of ``row``; returns a row to mitigate
    immediately (PARA/Graphene) or None."""
    spec = state.spec
    t = state.tracker

    if isinstance(spec, Baseline):
        hit = tk.lookup(t, row)
        if hit is not None:
            tk.update_hit(t, hit, now)
        else:
            tk.insert(t, row, spec.eviction, eviction, now)
        return None

    if isinstance(spec, Proteas):
        if not sampling.bernoulli(spec.sampling_p):
            return None
        hit = tk.lookup(t, row)
        if hit is not None:
            tk.update_hit(t, hit, now)
        else:
            tk.insert(t, row, spec.eviction, eviction, now)
        return None

    if isinstance(spec, Pmss):
        hit = tk.lookup(t, row)
        if hit is not None:
            tk.update_hit(t, hit, now)
        elif t.occupancy < t.capacity:
            tk.insert(t, row, spec.eviction, eviction, now)
        elif sampling.bernoulli(spec.sampling_p):
            tk.insert(t, row, spec.eviction, eviction, now)
        return None

    if isinstance(spec, Dsac):
        hit = tk.lookup(t, row)
        if hit is not None:
            tk.update_hit(t, hit, now)
        elif t.occupancy < t.capacity:
            tk.insert(t, row, tk.LFU, eviction, now)
        elif sampling.bernoulli(dsac_evict_prob(_min_valid_count(t), spec.p_floor)):
            tk.insert(t, row, tk.LFU, eviction, now)
        return None

    if isinstance(spec, Prohit):
        hit = tk.lookup(state.hot, row)
        if hit is not None:
            tk.update_hit(state.hot, hit, now)
            return None
        hit = tk.lookup(state.cold, row)
        if hit is not None:
            # count the hit without refreshing last_touch: cold eviction is
            # FIFO over insertion times
            state.cold.counts[hit] += 1
            if sampling.bernoulli(spec.promote_p):
                _prohit_promote(state, hit, now)
            return None
        # cold miss: FIFO insertion (last_touch doubles as insertion time)
        _fifo_insert(state.cold, row, now)
        return None

    if isinstance(spec, Para):
        if para.bernoulli(spec.mitigate_p):
            return row
        return None

    if isinstance(spec, Graphene):
        hit = tk.lookup(t, row)
        if hit is not None:
            t.counts[hit] += 1
            if t.counts[hit] >= spec.mitigation_threshold:
                t.valid[hit] = False
                t.counts[hit] = 0
                t.rows[hit] = -1
                return row
            return None
        for i in range(t.capacity):
            if not t.valid[i]:
                t.rows[i] = row
                t.counts[i] = 1
                t.last_touch[i] = now
                t.valid[i] = True
                if t.counts[i] >= spec.mitigation_threshold:
                    t.valid[i] = False
                    t.counts[i] = 0
                    t.rows[i] = -1
                    return row
                return None
        # full: decrement every count, dropping entries that reach zero
        for i in range(t.capacity):
            if t.valid[i]:
                t.counts[i] -= 1
                if t.counts[i] == 0:
                    t.valid[i] = False
                    t.rows[i] = -1
        return None

    raise TypeError(f"unknown policy spec: {spec!r}")


def _fifo_insert(t: TrackerState, row: int, now: int) -> None:
    for i in range(t.capacity):
        if not t.valid[i]:
            t.rows[i] = row
            t.counts[i] = 0
            t.last_touch[i] = now
            t.valid[i] = True
            return
    victim = tk._argmin(t.last_touch, t.valid)
    t.rows[victim] = row
    t.counts[victim] = 0
    t.last_touch[victim] = now


def _prohit_promote(state: PolicyState, cold_index: int, now: int) -> None:
    """Move a cold entry into the hot table; a full hot table demotes its
    LFU entry into the slot the promotion just freed."""
    cold = state.cold
    hot = state.hot
    row = cold.rows[cold_index]
    count = cold.counts[cold_index]
    cold.valid[cold_index] = False
    cold.rows[cold_index] = -1
    cold.counts[cold_index] = 0

    for i in range(hot.capacity):
        if not hot.valid[i]:
            hot.rows[i] = row
            hot.counts[i] = count
            hot.last_touch[i] = now
            hot.valid[i] = True
            return
    demote = tk._argmin(hot.counts, hot.valid)
    cold.rows[cold_index] = hot.rows[demote]
    cold.counts[cold_index] = hot.counts[demote]
    cold.last_touch[cold_index] = now
    cold.valid[cold_index] = True
    hot.rows[demote] = row
    hot.counts[demote] = count
    hot.last_touch[demote] = now


def on_scheduled_mitigation(state: PolicyState) -> Optional[int]:
    """Scheduled (tREFI/RFM) mitigation: MFU selection with invalidation.
    PARA and Graphene mitigate on activations instead, so their slots are
    always empty."""
    spec = state.spec
    if isinstance(spec, (Para, Graphene)):
        return None
    if isinstance(spec, Prohit):
        row = tk.select_mitigation(state.hot)
        if row is None:
            row = tk.select_mitigation(state.cold)
        return row
    return tk.select_mitigation(state.tracker)
