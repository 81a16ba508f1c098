"""Counter-based pseudo-randomness: one independent stream per (seed, trial).

The generator is SplitMix64: the state advances by the golden-ratio
increment and the output is the usual xorshift-multiply finalizer.  Stream
i under seed s starts from ``mix64(s ^ mix64(i * MULT))``; both maps are
bijections on 64-bit words, so distinct trial indices give distinct
streams (2^64 of them per seed).  Results of a Monte Carlo run therefore
depend only on (seed, trial index), never on scheduling or chunking.

The compiled kernels re-implement exactly this arithmetic in C; parity is
pinned by tests.
"""

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MULT1 = 0xBF58476D1CE4E5B9
MULT2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 output finalizer (a bijection on 64-bit words)."""
    x &= M64
    x = ((x ^ (x >> 30)) * MULT1) & M64
    x = ((x ^ (x >> 27)) * MULT2) & M64
    return x ^ (x >> 31)


def stream_state(seed: int, index: int) -> int:
    """Initial state of the stream for trial `index` under `seed`."""
    return mix64((seed & M64) ^ mix64((index * MULT1) & M64))


class TrialStream:
    """A single SplitMix64 stream."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & M64

    @classmethod
    def for_trial(cls, seed: int, index: int) -> "TrialStream":
        return cls(stream_state(seed, index))

    def next64(self) -> int:
        self.state = (self.state + GOLDEN) & M64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by masked rejection.

        n == 1 consumes no randomness; this convention is part of the
        stream contract shared with the compiled kernels.
        """
        if n <= 0:
            raise ValueError("bound must be positive")
        if n == 1:
            return 0
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            v = self.next64() & mask
            if v < n:
                return v

    def big_below(self, n: int) -> int:
        """Uniform arbitrary-precision integer in [0, n).

        Draws 64-bit words least-significant first, masks to the bit
        length of n-1, and rejects values >= n, so the result is exactly
        uniform for any positive n.
        """
        if n <= 0:
            raise ValueError("bound must be positive")
        if n == 1:
            return 0
        bits = (n - 1).bit_length()
        words = (bits + 63) // 64
        mask = (1 << bits) - 1
        while True:
            v = 0
            for j in range(words):
                v |= self.next64() << (64 * j)
            v &= mask
            if v < n:
                return v
