"""DRAM timing constants, derived activation budgets, and storage arithmetic.

Default values correspond to a DDR4 device: a 64 ms refresh window covered
by 8192 REF commands issued every 7.8 us, with a 350 ns REF execution time
and a 45 ns row-cycle time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_NUM_ROWS = 131072  # 128K rows per bank


@dataclass(frozen=True)
class DramTimings:
    """Device timing constants, all durations in nanoseconds."""

    trefw_ns: int = 64_000_000
    trefi_ns: int = 7_800
    trfc_ns: int = 350
    trc_ns: int = 45
    refs_per_trefw: int = 8192

    def __post_init__(self):
        for name in ("trefw_ns", "trefi_ns", "trfc_ns", "trc_ns", "refs_per_trefw"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.trfc_ns >= self.trefi_ns:
            raise ValueError("trfc_ns must be smaller than trefi_ns")
        if self.trc_ns >= self.trefi_ns:
            raise ValueError("trc_ns must be smaller than trefi_ns")
        if self.refs_per_trefw * self.trefi_ns > self.trefw_ns * 1.01:
            raise ValueError("refs_per_trefw * trefi_ns inconsistent with trefw_ns")


@dataclass(frozen=True)
class DerivedBudgets:
    """Activation budgets implied by the timing constants."""

    acts_per_trefi: int
    acts_per_trefw: int
    trefi_windows: int


@dataclass(frozen=True)
class MitigationSchedule:
    """How often mitigations fire and how wide each mitigative refresh is.

    ``mitigations_per_trefi`` (k) sets the RFM threshold to
    floor(acts_per_trefi / k); k=1 degenerates to the regular per-REF
    mitigation slot.
    """

    mitigations_per_trefi: int = 1
    blast_radius: int = 2

    def __post_init__(self):
        if self.mitigations_per_trefi < 1:
            raise ValueError("mitigations_per_trefi must be >= 1")
        if self.blast_radius not in (1, 2, 4):
            raise ValueError("blast_radius must be one of 1, 2, 4")


def derive_budgets(timings: DramTimings) -> DerivedBudgets:
    """Compute per-tREFI and per-tREFW activation budgets (floor-rounded)."""
    acts_per_trefi = (timings.trefi_ns - timings.trfc_ns) // timings.trc_ns
    if acts_per_trefi < 1:
        raise ValueError("timings leave no activation budget per tREFI")
    return DerivedBudgets(
        acts_per_trefi=acts_per_trefi,
        acts_per_trefw=acts_per_trefi * timings.refs_per_trefw,
        trefi_windows=timings.refs_per_trefw,
    )


def rfm_threshold(budgets: DerivedBudgets, k: int) -> int:
    """Activations between mitigation events for k mitigations per tREFI."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return max(1, budgets.acts_per_trefi // k)


def victim_set(row: int, blast_radius: int, num_rows: int = DEFAULT_NUM_ROWS) -> set[int]:
    """Rows refreshed when ``row`` is mitigated: neighbors within the blast
    radius, truncated at the bank edges, never including the aggressor."""
    if not 0 <= row < num_rows:
        raise ValueError("row out of range")
    lo = max(0, row - blast_radius)
    hi = min(num_rows - 1, row + blast_radius)
    return {r for r in range(lo, hi + 1) if r != row}


def graphene_capacity(budgets: DerivedBudgets, trh: int) -> int:
    """Counters per bank needed by a Misra-Gries tracker to guarantee no row
    accumulates trh/2 untracked activations within one refresh window."""
    if trh < 2:
        raise ValueError("trh must be >= 2")
    return math.ceil(budgets.acts_per_trefw / (trh / 2))


def storage_bytes(entries_per_bank: int, bits_per_entry: int, banks: int) -> int:
    """Total tracker storage in bytes across all banks, rounded up."""
    if entries_per_bank <= 0 or bits_per_entry <= 0 or banks <= 0:
        raise ValueError("all arguments must be positive")
    return -(-entries_per_bank * bits_per_entry * banks // 8)
