"""Fixed-capacity fully-associative aggressor-row table.

This is the reference (pure-Python) implementation of the tracker state
machine: lookup, update-on-hit, insertion with a pluggable eviction rule,
and MFU mitigation selection. The compiled kernel replicates the same
semantics, including tie-breaking and random-draw order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rng import RngStream

BIP_DEFAULT_EPSILON = 1.0 / 32.0


@dataclass(frozen=True)
class EvictionRule:
    """Victim selection when inserting into a full tracker.

    kind: one of "lfu", "lru", "random", "bip".
    For LFU/LRU ties the lowest slot index wins, keeping the deterministic
    baseline fully deterministic. BIP inserts over the LRU victim with
    probability epsilon and bypasses otherwise.
    """

    kind: str = "lfu"
    epsilon: float = BIP_DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in ("lfu", "lru", "random", "bip"):
            raise ValueError(f"unknown eviction rule: {self.kind}")
        if self.kind == "bip" and not 0.0 < self.epsilon <= 1.0:
            raise ValueError("bip epsilon must be in (0, 1]")


LFU = EvictionRule("lfu")
LRU = EvictionRule("lru")
RANDOM = EvictionRule("random")
BIP = EvictionRule("bip")


@dataclass
class TrackerState:
    capacity: int = 16
    rows: list[int] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    last_touch: list[int] = field(default_factory=list)
    valid: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not self.rows:
            self.rows = [-1] * self.capacity
            self.counts = [0] * self.capacity
            self.last_touch = [0] * self.capacity
            self.valid = [False] * self.capacity

    @property
    def occupancy(self) -> int:
        return sum(self.valid)


def lookup(tracker: TrackerState, row: int) -> int | None:
    """Slot index holding ``row``, or None on a miss. Does not modify state."""
    for i in range(tracker.capacity):
        if tracker.valid[i] and tracker.rows[i] == row:
            return i
    return None


def update_hit(tracker: TrackerState, index: int, now: int) -> None:
    """Increment the hit entry's frequency counter and refresh its recency."""
    if not 0 <= index < tracker.capacity or not tracker.valid[index]:
        raise ValueError("update_hit requires a valid entry index")
    tracker.counts[index] += 1
    tracker.last_touch[index] = now


def _argmin(values, valid) -> int:
    best = None
    for i, v in enumerate(values):
        if valid[i] and (best is None or v < values[best]):
            best = i
    return best


def insert(
    tracker: TrackerState,
    row: int,
    rule: EvictionRule,
    rng: RngStream,
    now: int,
) -> tuple[bool, int | None]:
    """Insert ``row`` (a known miss) with count 0.

    Invalid slots are filled first. On a full tracker the eviction rule
    picks a victim; BIP may bypass the insertion entirely. Returns
    (inserted, evicted_row).
    """
    if lookup(tracker, row) is not None:
        raise ValueError("row already tracked")
    for i in range(tracker.capacity):
        if not tracker.valid[i]:
            tracker.rows[i] = row
            tracker.counts[i] = 0
            tracker.last_touch[i] = now
            tracker.valid[i] = True
            return True, None

    if rule.kind == "lfu":
        victim = _argmin(tracker.counts, tracker.valid)
    elif rule.kind == "lru":
        victim = _argmin(tracker.last_touch, tracker.valid)
    elif rule.kind == "random":
        victim = rng.uniform_index(tracker.capacity)
    else:  # bip
        if not rng.bernoulli(rule.epsilon):
            return False, None
        victim = _argmin(tracker.last_touch, tracker.valid)

    evicted = tracker.rows[victim]
    tracker.rows[victim] = row
    tracker.counts[victim] = 0
    tracker.last_touch[victim] = now
    return True, evicted


def select_mitigation(tracker: TrackerState) -> int | None:
    """Pick the MFU entry (lowest index on ties), invalidate it, and return
    its row; None when the tracker holds nothing."""
    best = None
    for i in range(tracker.capacity):
        if tracker.valid[i] and (best is None or tracker.counts[i] > tracker.counts[best]):
            best = i
    if best is None:
        return None
    row = tracker.rows[best]
    tracker.valid[best] = False
    tracker.counts[best] = 0
    tracker.rows[best] = -1
    return row
