"""Seeded generators.  PCG64 via numpy, portable across platforms."""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed, stage: str | None = None) -> np.random.Generator:
    """A PCG64 generator for ``seed``; ``stage`` names an independent sub-stream.

    Passing an existing Generator returns it unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    entropy = [int(seed) & _MASK64]
    if stage is not None:
        entropy.append(zlib.crc32(stage.encode("utf-8")))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
