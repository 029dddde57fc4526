"""SplitMix64, the only randomness source in the package.

Scalar generator for instance generation plus a numpy-vectorised variant that
advances one independent stream per Monte Carlo sample.  Sample ``i`` is seeded
with the ``i``-th output of ``SplitMix64(master_seed)``.
"""

from fractions import Fraction

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK = (1 << 64) - 1

# draws are compared on 53-bit integers against exact ceil(cdf * 2**53)
UNIT_BITS = 53


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK
        z = ((z ^ (z >> 27)) * MIX2) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), rejection-sampled so it is unbiased."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def chance(self, p: Fraction) -> bool:
        p = Fraction(p)
        return self.below(p.denominator) < p.numerator

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def sample(self, seq, k):
        pool = list(seq)
        out = []
        for _ in range(k):
            out.append(pool.pop(self.below(len(pool))))
        return out

    def pick(self, thresholds) -> int:
        """Index drawn from a distribution given by :func:`thresholds`."""
        r = self.next_u64() >> (64 - UNIT_BITS)
        i = 0
        while thresholds[i] <= r:
            i += 1
        return i


def derive_seeds(master: int, n: int) -> list:
    g = SplitMix64(master)
    return [g.next_u64() for _ in range(n)]


def thresholds(probs) -> list:
    """Exact integer cut points ``ceil(cdf_j * 2**53)`` for a rational distribution."""
    out = []
    acc = Fraction(0)
    scale = 1 << UNIT_BITS
    for p in probs:
        acc += p
        num = acc.numerator * scale
        out.append(-(-num // acc.denominator))
    if acc != 1:
        raise ValueError(f"distribution sums to {acc}, not 1")
    return out


class VectorSplitMix64:
    """``n`` independent SplitMix64 streams advanced in lockstep."""

    def __init__(self, master: int, n: int):
        self.state = np.array(derive_seeds(master, n), dtype=np.uint64)

    def next_u64(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            self.state += np.uint64(GAMMA)
            z = self.state.copy()
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        return z ^ (z >> np.uint64(31))

    def next_unit(self) -> np.ndarray:
        return (self.next_u64() >> np.uint64(64 - UNIT_BITS)).astype(np.int64)
