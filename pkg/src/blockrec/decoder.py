"""Per-cluster majority decoding and its exact error probability.

With the clusters known, maximum-likelihood estimation of a block-constant
matrix reduces to a majority vote over the non-erased observations in each
cluster; the overall error probability factors over clusters because the
channel is memoryless.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .model import (
    ONE,
    ZERO,
    BlockConstantMatrix,
    ChannelParams,
    ObservedMatrix,
    Partition,
    TiePolicy,
)

# Above this cluster size the exact O(size) summation is refused; callers
# should fall back to Monte Carlo or the exponential bounds.
EXACT_SIZE_CAP = 20000


def _tie_weight(tie: TiePolicy) -> float:
    return 0.5 if tie is TiePolicy.FAIR_COIN else 0.0


def _error_given_samples(s, p: float, tie: TiePolicy):
    """Vectorized misdecode probability given s non-erased samples.

    Error means a strict majority of the s samples were flipped, plus the
    tie mass (1 - w) B(s, s/2) p^{s/2} (1-p)^{s/2} when s is even.
    """
    s = np.asarray(s)
    half = s // 2
    err = stats.binom.sf(half, s, p)
    even = s % 2 == 0
    if np.any(even):
        tie_mass = stats.binom.pmf(half[even], s[even], p)
        err = np.asarray(err, dtype=float)
        err[even] += (1.0 - _tie_weight(tie)) * tie_mass
    return err


def correct_prob_given_samples(s: int, p: float, tie: TiePolicy) -> float:
    """Probability the majority vote is correct given s non-erased samples,
    each independently flipped with probability p (0 <= p <= 1/2)."""
    if s < 0:
        raise ValueError("sample count must be nonnegative")
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"flip probability must be in [0, 1/2], got {p}")
    return float(1.0 - _error_given_samples(np.array([s]), p, tie)[0])


def _cluster_error_prob(size: int, ch: ChannelParams, tie: TiePolicy) -> float:
    if size < 1:
        raise ValueError("cluster size must be positive")
    if size > EXACT_SIZE_CAP:
        raise ValueError(
            f"cluster size {size} exceeds the exact-computation cap {EXACT_SIZE_CAP}; "
            "use Monte Carlo estimation or the exponential bounds instead"
        )
    s = np.arange(size + 1)
    weights = stats.binom.pmf(s, size, 1.0 - ch.epsilon)
    return float(np.dot(weights, _error_given_samples(s, ch.p, tie)))


def cluster_correct_prob(size: int, ch: ChannelParams, tie: TiePolicy) -> float:
    """Probability of a correct majority decision for a cluster of the given
    size, averaged over the binomial number of non-erased samples."""
    return 1.0 - _cluster_error_prob(size, ch, tie)


def exact_error_prob(cluster_sizes, ch: ChannelParams, tie: TiePolicy) -> float:
    """Exact probability that at least one cluster is misdecoded.

    ``cluster_sizes`` is the multiset {m_i * n_j} of cluster sizes. Computed
    as 1 - exp(sum_s N(s) log(1 - err(s))) with one error evaluation per
    distinct size.
    """
    sizes = np.asarray(cluster_sizes)
    if sizes.size == 0:
        raise ValueError("need at least one cluster")
    uniq, counts = np.unique(sizes, return_counts=True)
    log_ok = 0.0
    for size, count in zip(uniq, counts):
        err = _cluster_error_prob(int(size), ch, tie)
        if err >= 1.0:
            return 1.0
        log_ok += count * np.log1p(-err)
    return float(-np.expm1(log_ok))


def majority_decode(
    Y: ObservedMatrix,
    rows: Partition,
    cols: Partition,
    tie: TiePolicy,
    rng: np.random.Generator | None = None,
) -> tuple[BlockConstantMatrix, bool]:
    """Majority-vote each cluster of Y given the partitions.

    Erasures are ignored. A tied cluster gets a fair bit under FAIR_COIN
    (one draw per tied cluster, in row-major order over cluster ids) or the
    value 0 under COUNT_AS_ERROR. Returns the estimate and whether any
    cluster tied.
    """
    if len(rows) != Y.m or len(cols) != Y.n:
        raise ValueError(
            f"partition lengths ({len(rows)}, {len(cols)}) do not match matrix shape ({Y.m}, {Y.n})"
        )
    if tie is TiePolicy.FAIR_COIN and rng is None:
        raise ValueError("FAIR_COIN tie policy needs a random stream")
    r, t = rows.cluster_count, cols.cluster_count
    ids = rows.labels[:, None] * t + cols.labels[None, :]
    ones = np.bincount(ids[Y.entries == ONE], minlength=r * t)
    zeros = np.bincount(ids[Y.entries == ZERO], minlength=r * t)
    blocks = (ones > zeros).astype(np.int8)
    ties = ones == zeros
    tie_occurred = bool(ties.any())
    if tie_occurred and tie is TiePolicy.FAIR_COIN:
        blocks[ties] = rng.integers(0, 2, size=int(ties.sum()), dtype=np.int8)
    estimate = BlockConstantMatrix(rows, cols, blocks.reshape(r, t))
    return estimate, tie_occurred
