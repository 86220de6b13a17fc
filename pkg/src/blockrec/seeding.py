"""Deterministic seed derivation for parallel trials.

Seeds are derived with SplitMix64: the stream seed for index i is the
SplitMix64 output at state master + (i + 1) * GOLDEN (mod 2^64). The
derivation depends only on (master_seed, index), so results are identical
no matter how trials are distributed over workers.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for sub-stream ``index`` of ``master_seed``."""
    if index < 0:
        raise ValueError("index must be nonnegative")
    return _mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


def stream(master_seed: int, index: int) -> np.random.Generator:
    """PCG64 generator for sub-stream ``index`` of ``master_seed``."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, index)))
