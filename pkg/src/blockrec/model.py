"""Core domain types: channel parameters, index partitions, block-constant
matrices, and observed (possibly erased) matrices.

All types are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# Observed-entry alphabet. ERASED marks an entry lost by the channel.
ZERO = 0
ONE = 1
ERASED = 2


class TiePolicy(str, Enum):
    """How the majority decoder settles an equal count of zeros and ones.

    FAIR_COIN draws a fair bit per tied cluster; COUNT_AS_ERROR emits 0 and
    flags the tie, which makes "all entries erased" a guaranteed error.
    """

    FAIR_COIN = "fair_coin"
    COUNT_AS_ERROR = "count_as_error"


@dataclass(frozen=True)
class ChannelParams:
    """Erasure probability followed by a symmetric bit-flip probability."""

    epsilon: float
    p: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"erasure probability must be in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"flip probability must be in [0, 1/2], got {self.p}")


def canonicalize_labels(labels) -> tuple[np.ndarray, np.ndarray]:
    """Relabel cluster ids so they appear in order of first occurrence.

    Returns ``(canonical, old_ids)`` where ``old_ids[k]`` is the original id
    of canonical cluster ``k``. Cluster membership is unchanged.
    """
    labels = np.asarray(labels)
    max_label = int(labels.max())
    if max_label > 4 * labels.size + 64:
        # ids much sparser than the index range: dense first-position
        # tables would be wasteful, group through np.unique instead
        uniq, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order))
        return rank[inverse.ravel()], uniq[order]
    first_pos = np.full(max_label + 1, labels.size, dtype=np.int64)
    np.minimum.at(first_pos, labels, np.arange(labels.size))
    old_ids = np.flatnonzero(first_pos < labels.size)
    old_in_canonical = old_ids[np.argsort(first_pos[old_ids], kind="stable")]
    rank = np.empty(max_label + 1, dtype=np.int64)
    rank[old_in_canonical] = np.arange(old_in_canonical.size)
    return rank[labels], old_in_canonical


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of row (or column) indices to clusters.

    ``labels[i]`` is the cluster id of index ``i``; ids are canonical
    (first occurrence of each id comes in increasing order, starting at 0),
    so two partitions are equal iff their label arrays are equal.
    """

    labels: np.ndarray
    cluster_count: int
    sizes: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        sizes = np.ascontiguousarray(self.sizes, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-d array")
        if self.cluster_count < 1 or sizes.shape != (self.cluster_count,):
            raise ValueError("sizes must have one entry per cluster")
        if labels.min() < 0 or labels.max() != self.cluster_count - 1:
            raise ValueError("labels must cover 0..cluster_count-1")
        running = np.maximum.accumulate(labels)
        if labels[0] != 0 or np.any(np.diff(running) > 1):
            raise ValueError("labels must be canonical (first-occurrence order)")
        if np.any(sizes <= 0) or np.any(np.bincount(labels) != sizes):
            raise ValueError("sizes must match label multiplicities")
        labels.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return self.labels.size


def _partition_unchecked(labels: np.ndarray, sizes: np.ndarray) -> Partition:
    """Build a Partition without re-validating; the caller guarantees the
    labels are canonical and the sizes match."""
    part = object.__new__(Partition)
    labels.setflags(write=False)
    sizes.setflags(write=False)
    object.__setattr__(part, "labels", labels)
    object.__setattr__(part, "cluster_count", int(sizes.size))
    object.__setattr__(part, "sizes", sizes)
    return part


def validate_partition(labels) -> Partition:
    """Build a canonical :class:`Partition` from an arbitrary label array."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a nonempty 1-d array")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValueError("labels must be integers")
    if labels.min() < 0:
        raise ValueError("labels must be nonnegative")
    canonical, _ = canonicalize_labels(labels)
    sizes = np.bincount(canonical)
    return Partition(canonical, int(sizes.size), sizes)


@dataclass(frozen=True, eq=False)
class BlockConstantMatrix:
    """A binary matrix that is constant on every row-cluster x column-cluster
    block. ``block_values[i, j]`` is the bit carried by block ``(i, j)``."""

    row_partition: Partition
    col_partition: Partition
    block_values: np.ndarray

    def __post_init__(self):
        blocks = np.ascontiguousarray(self.block_values, dtype=np.int8)
        shape = (self.row_partition.cluster_count, self.col_partition.cluster_count)
        if blocks.shape != shape:
            raise ValueError(f"block_values must have shape {shape}, got {blocks.shape}")
        if not ((blocks >= 0) & (blocks <= 1)).all():
            raise ValueError("block values must be bits")
        blocks.setflags(write=False)
        object.__setattr__(self, "block_values", blocks)

    @property
    def m(self) -> int:
        return len(self.row_partition)

    @property
    def n(self) -> int:
        return len(self.col_partition)

    def entry_at(self, i: int, k: int) -> int:
        """Matrix entry (i, k), resolved through the block-value table."""
        if not (0 <= i < self.m and 0 <= k < self.n):
            raise IndexError(f"entry ({i}, {k}) out of range for {self.m}x{self.n} matrix")
        return int(self.block_values[self.row_partition.labels[i], self.col_partition.labels[k]])

    def to_dense(self) -> np.ndarray:
        """Materialize the full m x n bit matrix."""
        return self.block_values[np.ix_(self.row_partition.labels, self.col_partition.labels)]


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """An m x n matrix of observations over {0, 1, ERASED}."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.int8)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError("entries must be a nonempty 2-d array")
        if not ((entries >= ZERO) & (entries <= ERASED)).all():
            raise ValueError("entries must be 0, 1, or ERASED")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class GenerationLaw:
    """Sampling law for block-constant matrices: equal-size clusters
    (m0 x n0 each) with independent fair-bit block values.

    With ``permute`` the indices are assigned to clusters uniformly at
    random; otherwise clusters are contiguous index ranges.
    """

    m: int
    n: int
    m0: int
    n0: int
    permute: bool = True

    def __post_init__(self):
        for name in ("m", "n", "m0", "n0"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.m % self.m0:
            raise ValueError(f"m0={self.m0} must divide m={self.m}")
        if self.n % self.n0:
            raise ValueError(f"n0={self.n0} must divide n={self.n}")

    @property
    def r(self) -> int:
        return self.m // self.m0

    @property
    def t(self) -> int:
        return self.n // self.n0
