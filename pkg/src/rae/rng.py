"""Seeded, splittable random streams.

Every stream is a PCG64 generator keyed by ``(seed, *keys)`` through
``numpy.random.SeedSequence``, so the same keys always give the same draws no
matter which thread or in what order streams are created.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode())
    k = int(k)
    if k < 0:
        raise ValueError(f"stream keys must be nonnegative, got {k}")
    return k


def stream(seed: int, *keys) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([_key(seed), *map(_key, keys)])))
