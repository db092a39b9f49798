"""Deterministic, splittable pseudo-random streams.

Every simulation draws from independent substreams derived by hashing a
(master seed, purpose, pattern index, seed index) tuple, so parallel sweep
workers need no coordination and any run is bit-reproducible. The generator
is a SplitMix64 counter stream; the compiled kernel implements the exact
same recurrence, so both kernels produce identical draws.
"""

from __future__ import annotations

import hashlib

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO64 = 1 << 64


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def purpose_code(purpose: str) -> int:
    """Stable 64-bit tag for a purpose label."""
    return int.from_bytes(hashlib.blake2b(purpose.encode(), digest_size=8).digest(), "little")


def stream_seed(master_seed: int, purpose: str, pattern_index: int = 0, seed_index: int = 0) -> int:
    """Derive the initial SplitMix64 state for one substream."""
    s = master_seed & _MASK
    for tag in (purpose_code(purpose), pattern_index & _MASK, seed_index & _MASK):
        s = _mix((s + _GOLDEN) & _MASK) ^ tag
    return s & _MASK


class RngStream:
    """One independent SplitMix64 substream."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def bernoulli(self, p: float) -> bool:
        """True with probability p. Always consumes exactly one draw."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        u = self.next_u64()
        if p >= 1.0:
            return True
        return u < int(p * _TWO64)

    def uniform_index(self, n: int) -> int:
        """Uniform index in [0, n) via the multiply-shift reduction."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return (self.next_u64() * n) >> 64


def derive_stream(master_seed: int, purpose: str, pattern_index: int = 0, seed_index: int = 0) -> RngStream:
    return RngStream(stream_seed(master_seed, purpose, pattern_index, seed_index))
