"""Seeded random streams and the replicate seed-splitting rule.

Every stochastic entry point takes a ``numpy.random.Generator``. Parallel
replicates never share a stream: replicate ``k`` of a run with master seed
``s`` uses ``substream(s, k)``, and nested components extend the index path,
e.g. ``substream(s, point_index, replicate_index)``. The derivation is
``SeedSequence((s, *path))``, so any (seed, path) pair is reproducible
without coordination between workers.
"""
from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "substream"]


def make_rng(seed: int) -> np.random.Generator:
    """Root generator for a master seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for one replicate / grid point of a run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, *path))))
