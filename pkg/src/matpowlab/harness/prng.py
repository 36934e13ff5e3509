"""Deterministic 64-bit shift-register generator for reproducible sampling.

The update is the classic xorshift64 triple (13, 7, 17): x ^= x << 13;
x ^= x >> 7; x ^= x << 17, all modulo 2^64. Streams for individual grid
instances are derived by folding integer tags into the seed one at a time,
so any port that follows this file reproduces the exact sample sequence.
"""

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class ShiftRegister:
    """xorshift64 state machine; the zero state is remapped to the golden ratio."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64 or _GOLDEN

    def next_word(self) -> int:
        x = self.state
        x ^= (x << 13) & MASK64
        x ^= x >> 7
        x ^= (x << 17) & MASK64
        self.state = x
        return x

    def below(self, n: int) -> int:
        """Reduce one word modulo n; the bias is negligible at desk scale."""
        if n < 1:
            raise ValueError(f"need a positive range, got {n}")
        return self.next_word() % n

    def unit_nonzero(self, n: int) -> int:
        """Uniform draw from 1..n-1."""
        if n < 2:
            raise ValueError(f"need a modulus above one, got {n}")
        return 1 + self.below(n - 1)


def derive_stream(seed: int, *tags: int) -> ShiftRegister:
    """Per-instance stream: xor each (tag + 1) * golden into the state, then step."""
    gen = ShiftRegister(seed)
    for tag in tags:
        gen.state = (gen.state ^ (((tag + 1) * _GOLDEN) & MASK64)) or _GOLDEN
        gen.next_word()
    return gen
