"""Memoryless erasure + symmetric bit-flip cascade."""

from __future__ import annotations

import numpy as np

from .model import ERASED, BlockConstantMatrix, ChannelParams, ObservedMatrix


def transmit(X, ch: ChannelParams, rng: np.random.Generator) -> ObservedMatrix:
    """Pass a bit matrix through the channel: each entry is independently
    erased with probability epsilon, otherwise flipped with probability p.

    Two uniforms are consumed per entry (erasure decision first), in
    row-major order from the given stream, so a fixed seed reproduces the
    same observation regardless of how trials are scheduled.
    """
    dense = X.to_dense() if isinstance(X, BlockConstantMatrix) else np.asarray(X)
    if dense.ndim != 2:
        raise ValueError("input matrix must be 2-d")
    u = rng.random(size=dense.shape + (2,))
    erased = u[..., 0] < ch.epsilon
    flipped = u[..., 1] < ch.p
    out = np.where(erased, ERASED, dense ^ flipped)
    return ObservedMatrix(out.astype(np.int8))
