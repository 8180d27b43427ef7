"""Seeded random streams.

All randomness goes through numpy's Philox4x32-10 counter-based bit generator
keyed by the integer seed, so a seed reproduces the same stream on every
platform numpy supports.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
