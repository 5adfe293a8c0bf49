"""
Seeded randomness
=================
Every random draw in the simulator comes from a numpy Generator (PCG64)
created here, so a seed fully determines a run. Draws of arbitrary-size
integers are assembled from uniform 64-bit words with rejection.
"""

import numpy as np

WORD_BITS = 64


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def uniform_below(rng: np.random.Generator, n: int) -> int:
    """Uniform integer on [0, n) for any positive n."""
    if n <= 0:
        raise ValueError(f"upper bound must be positive, got {n}")
    if n < 2**62:
        return int(rng.integers(0, n))

    bits = n.bit_length()
    words = -(-bits // WORD_BITS)
    mask = (1 << bits) - 1
    while True:
        draw = rng.integers(0, 2**WORD_BITS, size=words, dtype=np.uint64)
        value = 0
        for i, word in enumerate(draw):
            value |= int(word) << (WORD_BITS * i)
        value &= mask
        if value < n:
            return value


def uniform_unit(rng: np.random.Generator) -> float:
    """Uniform float on [0, 1)."""
    return float(rng.random())
