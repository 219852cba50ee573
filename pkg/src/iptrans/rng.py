"""Seeding helpers.

All randomness in the package flows through ``numpy.random.Generator`` objects
backed by the counter-based Philox bit generator.  Philox is splittable: a
single integer seed expands through ``SeedSequence`` into any number of
statistically independent substreams, which keeps multi-variable experiments
(an X stream, a Y stream, a permutation stream, ...) reproducible bit for bit
from one documented seed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_generator", "substreams", "uniform_open"]


def make_generator(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """One Philox generator from an integer seed (or a prepared SeedSequence)."""
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(seq))


def substreams(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` independent generators derived from one root seed."""
    return [make_generator(child) for child in np.random.SeedSequence(int(seed)).spawn(n)]


def uniform_open(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1).

    ``Generator.random`` can return exactly 0.0, which quantile transforms
    reject; drawing 53-bit integers from 1 to 2^53 - 1 excludes both endpoints
    while staying an honest equidistributed uniform.
    """
    return rng.integers(1, 1 << 53, size=n).astype(float) / float(1 << 53)
