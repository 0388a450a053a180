"""SplitMix64: a tiny, fully specified 64-bit generator.

Used wherever generated artifacts must be byte-identical across platforms.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Independent child seed number ``index`` of ``seed``."""
    return mix64((seed & MASK64) ^ mix64((index + 1) * GOLDEN & MASK64))


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection; ``bound <= 2**64``."""
        if not 0 < bound <= 1 << 64:
            raise ValueError("bound must be in (0, 2**64]")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = self.next64()
            if x < limit:
                return x % bound
