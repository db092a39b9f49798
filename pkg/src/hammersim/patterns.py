"""Adversarial activation patterns.

Uniform patterns cycle through j target rows (TRRespass-style thrashing);
non-uniform patterns repeat the target block X times and then touch k
decoy rows once each (Blacksmith-style). Each pattern exists in an
"aligned" variant whose cycle phase resets at every tREFI boundary and an
"unaligned" variant that ignores boundaries.

The standard suite is 10 uniform + 240 non-uniform shapes, each aligned
and unaligned: 500 patterns with footprints from 2 to 220 rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

UNIFORM_J = (2, 4, 8, 16, 20, 32, 40, 80, 120, 140)
NONUNIFORM_X = (2, 3, 4, 5)
NONUNIFORM_K = (5, 10, 20, 32, 40, 80)

# Row-id assignment: stride-8 ids keep every victim set (blast radius <= 4)
# disjoint from every other pattern row.
_ROW_BASE = 1000
_ROW_STRIDE = 8


@dataclass(frozen=True)
class AttackPattern:
    kind: str  # "uniform", "nonuniform", or "trace"
    j: int
    x: int
    k: int
    aligned: bool
    target_rows: tuple[int, ...]
    decoy_rows: tuple[int, ...] = ()
    cycle: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        rows = self.target_rows + self.decoy_rows
        if len(set(rows)) != len(rows):
            raise ValueError("pattern rows must be distinct")
        if not self.cycle:
            if self.kind == "uniform":
                cyc = self.target_rows
            elif self.kind == "nonuniform":
                cyc = self.target_rows * self.x + self.decoy_rows
            else:
                raise ValueError("trace patterns must supply an explicit cycle")
            object.__setattr__(self, "cycle", cyc)

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def footprint(self) -> int:
        return len(self.target_rows) + len(self.decoy_rows)

    @property
    def pattern_id(self) -> str:
        al = "al" if self.aligned else "un"
        if self.kind == "uniform":
            return f"U_j{self.j}_{al}"
        if self.kind == "nonuniform":
            return f"N_j{self.j}_x{self.x}_k{self.k}_{al}"
        return f"T_p{self.period}_{al}"


def _rows(start: int, n: int) -> tuple[int, ...]:
    return tuple(_ROW_BASE + _ROW_STRIDE * i for i in range(start, start + n))


def uniform_pattern(j: int, aligned: bool = False) -> AttackPattern:
    if j < 1:
        raise ValueError("j must be >= 1")
    return AttackPattern("uniform", j=j, x=1, k=0, aligned=aligned, target_rows=_rows(0, j))


def nonuniform_pattern(j: int, x: int, k: int, aligned: bool = False) -> AttackPattern:
    if j < 1 or x < 1 or k < 1:
        raise ValueError("j, x, k must all be >= 1")
    return AttackPattern(
        "nonuniform",
        j=j,
        x=x,
        k=k,
        aligned=aligned,
        target_rows=_rows(0, j),
        decoy_rows=_rows(j, k),
    )


def trace_pattern(path: str | Path, aligned: bool = False) -> AttackPattern:
    """Custom pattern from a text file: one row-id per line, repeated
    cyclically."""
    cycle = tuple(int(line) for line in Path(path).read_text().split())
    if not cycle:
        raise ValueError(f"trace file {path} holds no row ids")
    seen: dict[int, None] = {}
    for r in cycle:
        seen.setdefault(r, None)
    return AttackPattern(
        "trace",
        j=len(seen),
        x=1,
        k=0,
        aligned=aligned,
        target_rows=tuple(seen),
        cycle=cycle,
    )


def standard_suite() -> list[AttackPattern]:
    """The 500-pattern evaluation suite."""
    suite = []
    for aligned in (False, True):
        for j in UNIFORM_J:
            suite.append(uniform_pattern(j, aligned))
        for j in UNIFORM_J:
            for x in NONUNIFORM_X:
                for k in NONUNIFORM_K:
                    suite.append(nonuniform_pattern(j, x, k, aligned))
    return suite


def next_activation(pattern: AttackPattern, global_act_index: int, trefi_position: int) -> int:
    """Row activated at a given point in the stream. Aligned patterns key
    the cycle off the position within the current tREFI; unaligned patterns
    run one infinite cycle."""
    if global_act_index < 0 or trefi_position < 0:
        raise ValueError("indices must be non-negative")
    idx = trefi_position if pattern.aligned else global_act_index
    return pattern.cycle[idx % pattern.period]
