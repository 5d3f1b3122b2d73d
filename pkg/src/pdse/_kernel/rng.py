"""Seedable, portable PCG32 generator.

Both kernel backends implement exactly this generator, so heuristic runs are
bit-reproducible regardless of which backend is active.  Draws use the
classic ``rand() mod m`` reduction on purpose; the tiny modulo bias is
irrelevant at candidate-list scale.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1
_MULT = 6364136223846793005
DEFAULT_STREAM = 54


class Pcg32:
    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = DEFAULT_STREAM):
        self.state = 0
        self.inc = ((stream << 1) | 1) & MASK64
        self.next32()
        self.state = (self.state + seed) & MASK64
        self.next32()

    def next32(self) -> int:
        old = self.state
        self.state = (old * _MULT + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32

    def below(self, bound: int) -> int:
        """rand() mod bound."""
        return self.next32() % bound

    def shuffle(self, items: list) -> None:
        """Fisher-Yates with rand() mod draws."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next32() % (i + 1)
            items[i], items[j] = items[j], items[i]
