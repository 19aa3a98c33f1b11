"""SplitMix64 stream with Box-Muller normals.

Integer state and a fixed floating-point path make samples reproducible in
any language that implements the same constants.
"""
from __future__ import annotations

import math

from .errors import InvalidParameter

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_POW_NEG53 = 1.0 / (1 << 53)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
        raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


class SplitMix64:
    """SplitMix64 generator (Steele, Lea and Flood's mixing constants)."""

    def __init__(self, seed: int = 0):
        self.state = check_seed(seed)
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """53-bit uniform in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO_POW_NEG53

    def below(self, k: int) -> int:
        """Integer in ``range(k)``."""
        if k < 1:
            raise InvalidParameter(f"range size must be positive, got {k}")
        return min(int(self.uniform() * k), k - 1)

    def gauss(self) -> float:
        """Standard normal deviate; pairs are consumed cosine first, then sine."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)

    def spawn(self) -> "SplitMix64":
        """Independent child stream seeded from this stream's next output."""
        return SplitMix64(self.next_u64())

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
