"""SplitMix64 search stream (pure-Python mirror of the jitted kernel RNG).

Both implementations use the same constants, so a Python stream and a kernel
stream seeded identically produce identical draws; a test pins this.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Seedable, platform-independent 64-bit generator."""

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def rand_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by masked rejection (unbiased)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        mask = 1
        while mask < bound - 1:
            mask = (mask << 1) | 1
        while True:
            r = self.next_u64() & mask
            if r < bound:
                return r

    def shuffle(self, seq) -> None:
        """In-place Fisher-Yates, one draw per position from the top down."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.rand_below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
