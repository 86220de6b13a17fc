"""Sampling of block-constant matrices and detection of degenerate draws
(block values that make two nominal clusters indistinguishable)."""

from __future__ import annotations

from math import comb

import numpy as np

from .model import (
    BlockConstantMatrix,
    GenerationLaw,
    Partition,
    _partition_unchecked,
    canonicalize_labels,
)


def _equal_cluster_partition(count: int, size: int, rng: np.random.Generator | None):
    """Canonical partition into ``count`` clusters of ``size`` indices each,
    permuted to a uniform random assignment when a stream is given. Returns
    the partition and the old cluster id of each canonical cluster."""
    labels = np.repeat(np.arange(count), size)
    if rng is None:
        order = np.arange(count)
    else:
        labels, order = canonicalize_labels(rng.permutation(labels))
    sizes = np.full(count, size, dtype=np.int64)
    return _partition_unchecked(labels.astype(np.int64, copy=False), sizes), order


def sample_block_matrix(law: GenerationLaw, rng: np.random.Generator) -> BlockConstantMatrix:
    """Draw a matrix under the equal-cluster-size law.

    Draw order is fixed: the r x t block bits (row-major), then the row
    label permutation, then the column label permutation, so a given seed
    reproduces the same matrix.
    """
    blocks = rng.integers(0, 2, size=(law.r, law.t), dtype=np.int8)
    rows, row_order = _equal_cluster_partition(law.r, law.m0, rng if law.permute else None)
    cols, col_order = _equal_cluster_partition(law.t, law.n0, rng if law.permute else None)
    # Reorder block values to match the canonical label ids.
    if law.permute:
        blocks = blocks[np.ix_(row_order, col_order)]
    return BlockConstantMatrix(rows, cols, blocks)


def _row_keys(table: np.ndarray) -> np.ndarray:
    """One hashable key per row of a bit table: the packed integer when the
    row fits into 62 bits, otherwise a lexicographic group id."""
    if table.shape[1] <= 62:
        return table @ (np.int64(1) << np.arange(table.shape[1], dtype=np.int64))
    _, inverse = np.unique(table, axis=0, return_inverse=True)
    return inverse


def effective_partition(X: BlockConstantMatrix) -> tuple[Partition, Partition]:
    """Coarsest partitions under which X is still block constant.

    Row clusters with identical block-value rows are merged, and likewise
    for columns; the result never refines the nominal partitions.
    """
    row_groups = np.unique(_row_keys(X.block_values), return_inverse=True)[1]
    col_groups = np.unique(_row_keys(X.block_values.T), return_inverse=True)[1]
    row_labels, _ = canonicalize_labels(row_groups[X.row_partition.labels])
    col_labels, _ = canonicalize_labels(col_groups[X.col_partition.labels])
    rows = Partition(row_labels, int(row_labels.max()) + 1, np.bincount(row_labels))
    cols = Partition(col_labels, int(col_labels.max()) + 1, np.bincount(col_labels))
    return rows, cols


def is_degenerate(X: BlockConstantMatrix) -> bool:
    """True iff some pair of row clusters or column clusters drew identical
    block values, so the effective clusters are larger than the nominal ones."""
    r = X.row_partition.cluster_count
    t = X.col_partition.cluster_count
    if np.unique(_row_keys(X.block_values)).size < r:
        return True
    return np.unique(_row_keys(X.block_values.T)).size < t


def cluster_merge_prob_bound(r: int, t: int) -> float:
    """Union bound on the probability of a degenerate draw:
    C(r,2) 2^-t + C(t,2) 2^-r, capped at 1."""
    if r < 1 or t < 1:
        raise ValueError("cluster counts must be positive")
    return min(1.0, comb(r, 2) * 2.0 ** -t + comb(t, 2) * 2.0 ** -r)


def cluster_merge_prob_bound_loose(m: int, n: int, r: int, t: int) -> float:
    """Looser form of the degenerate-draw bound, m^2 2^-t + n^2 2^-r."""
    if r < 1 or t < 1:
        raise ValueError("cluster counts must be positive")
    return min(1.0, m * m * 2.0 ** -t + n * n * 2.0 ** -r)
