"""Deterministic 64-bit pseudo-random generator (SplitMix64).

All randomized code in this package draws from this generator so that a
64-bit seed reproduces the same instances and heuristic runs on every
platform. Bounded sampling uses the multiply-shift technique
``(u64 * n) >> 64`` instead of a modulo, so no rejection loop is needed
and the draw sequence is one value per request.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 stream seeded by an arbitrary integer (reduced mod 2^64)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Requires n >= 1."""
        if n < 1:
            raise ValueError(f"bound must be >= 1, got {n}")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], endpoints included."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.below(hi - lo + 1)
