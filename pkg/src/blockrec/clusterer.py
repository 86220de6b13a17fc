"""Pairwise-distance clustering of rows and columns.

Two lines are declared to belong to the same cluster when the fraction of
positions where both are observed and disagree (normalized by the full line
length, not the common support) falls strictly below a threshold; clusters
are then read off as connected components of the declared-same graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ERASED, ONE, ZERO, ChannelParams, ObservedMatrix, Partition, validate_partition
from .bounds import distance_profile

AXES = ("rows", "columns")


@dataclass(frozen=True)
class PairwiseDecision:
    i: int
    j: int
    distance: float
    same_cluster: bool


def _lines(Y: ObservedMatrix, axis: str) -> np.ndarray:
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return Y.entries if axis == "rows" else Y.entries.T


def pairwise_distance(Y: ObservedMatrix, i: int, j: int, axis: str = "rows") -> float:
    """Fraction of positions where lines i and j are both observed and
    disagree, over the full line length."""
    lines = _lines(Y, axis)
    count = lines.shape[0]
    if not (0 <= i < count and 0 <= j < count):
        raise IndexError(f"indices ({i}, {j}) out of range for {count} {axis}")
    if i == j:
        raise ValueError("distance needs two distinct indices")
    a, b = lines[i], lines[j]
    both = (a != ERASED) & (b != ERASED)
    return np.count_nonzero(both & (a != b)) / lines.shape[1]


def distance_matrix(Y: ObservedMatrix, axis: str = "rows") -> np.ndarray:
    """All pairwise distances along one axis (symmetric, zero diagonal)."""
    lines = _lines(Y, axis)
    ones = (lines == ONE).astype(np.float32)
    zeros = (lines == ZERO).astype(np.float32)
    # disagree[i, j] counts positions where i shows 1 and j shows 0; both
    # orientations sum to the common-support disagreement count. Counts are
    # integers well below 2^24, so float32 accumulation is exact.
    disagree = ones @ zeros.T
    return (disagree + disagree.T).astype(np.float64) / lines.shape[1]


def pairwise_decisions(Y: ObservedMatrix, threshold: float, axis: str = "rows") -> list[PairwiseDecision]:
    """Materialize every pairwise decision (i < j) along one axis."""
    dist = distance_matrix(Y, axis)
    return [
        PairwiseDecision(i, j, dist[i, j], bool(dist[i, j] < threshold))
        for i in range(dist.shape[0])
        for j in range(i + 1, dist.shape[0])
    ]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def components_partition(adjacency: np.ndarray) -> Partition:
    """Connected components of a symmetric boolean adjacency matrix, as a
    canonical partition."""
    count = adjacency.shape[0]
    uf = _UnionFind(count)
    for i, j in zip(*np.nonzero(np.triu(adjacency, 1))):
        uf.union(int(i), int(j))
    return validate_partition([uf.find(i) for i in range(count)])


def cluster_axis(Y: ObservedMatrix, threshold: float, axis: str = "rows") -> Partition:
    """Cluster one axis: declare pairs with distance strictly below the
    threshold to be in the same cluster, then take connected components."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    dist = distance_matrix(Y, axis)
    adjacency = dist < threshold
    np.fill_diagonal(adjacency, False)
    return components_partition(adjacency)


def cluster_pipeline(Y: ObservedMatrix, ch: ChannelParams) -> tuple[Partition, Partition]:
    """Cluster rows and columns independently with the channel-derived
    threshold mu + delta/3."""
    threshold = distance_profile(ch).threshold
    return cluster_axis(Y, threshold, "rows"), cluster_axis(Y, threshold, "columns")


def partition_match(estimated: Partition, truth: Partition) -> bool:
    """True iff the two partitions agree up to relabeling."""
    if len(estimated) != len(truth):
        raise ValueError(f"partition lengths differ: {len(estimated)} vs {len(truth)}")
    return bool(np.array_equal(estimated.labels, truth.labels))


def _same_pair_count(sizes: np.ndarray) -> int:
    return int(np.sum(sizes * (sizes - 1) // 2))


def pairwise_error_count(estimated: Partition, truth: Partition) -> int:
    """Number of index pairs (i < j) whose same/different-cluster status
    disagrees between the two partitions."""
    if len(estimated) != len(truth):
        raise ValueError(f"partition lengths differ: {len(estimated)} vs {len(truth)}")
    joint = estimated.labels * truth.cluster_count + truth.labels
    joint_sizes = np.bincount(joint)
    same_both = _same_pair_count(joint_sizes[joint_sizes > 0])
    same_est = _same_pair_count(estimated.sizes)
    same_truth = _same_pair_count(truth.sizes)
    return same_est + same_truth - 2 * same_both
