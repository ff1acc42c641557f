"""xorshift64* generator.

The whole state is one 64-bit integer, so a world's randomness can be
copied, compared and logged. Seeds go through one splitmix64 round so
small or zero seeds still give a non-zero, well-mixed state.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK64 = 0xFFFFFFFFFFFFFFFF
_MULT = 0x2545F4914F6CDD1D


def _splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass
class XorShift64Star:
    state: int

    @classmethod
    def from_seed(cls, seed: int) -> "XorShift64Star":
        state = _splitmix64(seed & MASK64)
        return cls(state or 0x9E3779B97F4A7C15)

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def draw(self, upper: int) -> int:
        """Uniform integer in 1..upper."""
        if upper < 1:
            raise ValueError(f"upper must be >= 1, got {upper}")
        # Rejection sampling keeps the draw unbiased.
        limit = MASK64 - (MASK64 + 1) % upper
        while True:
            v = self.next_u64()
            if v <= limit:
                return v % upper + 1
