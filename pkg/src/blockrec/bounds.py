"""Closed-form bounds on the decoding and clustering error probabilities,
and the cluster-size thresholds they imply.

Every evaluator returns probabilities capped to [0, 1]; bounds whose
hypothesis can fail carry an explicit validity flag instead of silently
extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ChannelParams, Partition


@dataclass(frozen=True)
class ClusterSizeHistogram:
    """Counts of clusters by size: ``counts[s]`` clusters contain exactly s
    entries. When built from a full partition pair, sum(s * N(s)) = m * n."""

    counts: dict[int, int]

    def __post_init__(self):
        if not self.counts:
            raise ValueError("histogram must contain at least one cluster")
        for size, count in self.counts.items():
            if size < 1 or count < 1:
                raise ValueError("sizes and counts must be positive")
        object.__setattr__(self, "counts", dict(sorted(self.counts.items())))

    @property
    def s_min(self) -> int:
        return next(iter(self.counts))

    @property
    def s_max(self) -> int:
        return next(reversed(self.counts))

    @property
    def total_entries(self) -> int:
        return sum(s * c for s, c in self.counts.items())

    @classmethod
    def from_sizes(cls, sizes) -> "ClusterSizeHistogram":
        uniq, counts = np.unique(np.asarray(sizes, dtype=np.int64), return_counts=True)
        return cls({int(s): int(c) for s, c in zip(uniq, counts)})

    @classmethod
    def from_partitions(cls, rows: Partition, cols: Partition) -> "ClusterSizeHistogram":
        sizes = rows.sizes[:, None] * cols.sizes[None, :]
        return cls.from_sizes(sizes.ravel())


def effective_flip_rate(ch: ChannelParams) -> float:
    """epsilon + 2 (1 - epsilon) sqrt(p (1 - p)).

    The per-entry rate of observations that are erased or likely to upset a
    majority vote; it plays the role of the erasure probability in the
    pessimistic direction and always lies in [epsilon, 1].
    """
    return ch.epsilon + 2.0 * (1.0 - ch.epsilon) * math.sqrt(ch.p * (1.0 - ch.p))


def any_cluster_error_prob(u: float, sizes: ClusterSizeHistogram) -> float:
    """1 - prod_s (1 - u^s)^N(s): probability that at least one cluster
    fails when a size-s cluster fails independently with probability u^s."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must be in [0, 1], got {u}")
    if u == 1.0:
        return 1.0
    log_ok = sum(count * math.log1p(-(u ** s)) for s, count in sizes.counts.items())
    return -math.expm1(log_ok)


def decoding_error_bounds(sizes: ClusterSizeHistogram, ch: ChannelParams) -> tuple[float, float]:
    """Sandwich on the known-cluster ML error probability.

    Lower bound: erasures alone (all samples in some cluster lost); upper
    bound: the same expression at the effective flip rate.
    """
    return (
        any_cluster_error_prob(ch.epsilon, sizes),
        any_cluster_error_prob(effective_flip_rate(ch), sizes),
    )


def _small_cluster_floor(ch: ChannelParams) -> tuple[float, bool]:
    """Minimum cluster size for the exponential upper bound to hold
    (u^s <= 1/2 for every cluster), or invalid when the rate is 1."""
    p1 = effective_flip_rate(ch)
    if p1 >= 1.0:
        return math.inf, False
    if p1 == 0.0:
        return 0.0, True
    return math.log(2.0) / math.log(1.0 / p1), True


def exponential_error_bounds(
    sizes: ClusterSizeHistogram, ch: ChannelParams
) -> tuple[float, float, bool]:
    """Exponential-form bounds 1 - exp(-sum N(s) eps^s) and
    1 - exp(-2 ln2 sum N(s) p1^s).

    The upper bound requires every cluster size to be at least
    ln(2)/ln(1/p1); the returned flag reports whether that holds.
    """
    p1 = effective_flip_rate(ch)
    lower = -math.expm1(-sum(c * ch.epsilon ** s for s, c in sizes.counts.items()))
    upper = -math.expm1(-2.0 * math.log(2.0) * sum(c * p1 ** s for s, c in sizes.counts.items()))
    floor, defined = _small_cluster_floor(ch)
    valid = defined and sizes.s_min >= floor
    return lower, min(1.0, upper), valid


def extremal_size_error_bounds(
    s_min: int, s_max: int, m: int, n: int, ch: ChannelParams
) -> tuple[float, float, bool]:
    """Looser bounds that only use the extreme cluster sizes:
    1 - exp(-mn eps^{s_max} / s_max) and 1 - exp(-2 ln2 mn p1^{s_min} / s_min)."""
    if s_min < 1 or s_max < s_min:
        raise ValueError("need 1 <= s_min <= s_max")
    p1 = effective_flip_rate(ch)
    lower = -math.expm1(-m * n * ch.epsilon ** s_max / s_max)
    upper = -math.expm1(-2.0 * math.log(2.0) * m * n * p1 ** s_min / s_min)
    floor, defined = _small_cluster_floor(ch)
    valid = defined and s_min >= floor
    return lower, min(1.0, upper), valid


def recovery_size_thresholds(
    m: int, n: int, ch: ChannelParams, margin: float = 0.5
) -> tuple[float | None, float | None]:
    """Asymptotic cluster-size thresholds for an m x n matrix.

    Returns ``(decodable_min_size, undecodable_max_size)``: clusters at
    least ln(mn)/ln(1/p1) are decodable with vanishing error, while
    clusters at most (1 - margin) ln(mn)/ln(1/eps) force the error to one.
    A threshold is None when its rate sits at 0 or 1. ``margin`` is the
    slack in (0, 1) applied to the undecodable side.
    """
    if not 0.0 < margin < 1.0:
        raise ValueError(f"margin must be in (0, 1), got {margin}")
    log_mn = math.log(m * n)
    p1 = effective_flip_rate(ch)
    decodable = log_mn / math.log(1.0 / p1) if 0.0 < p1 < 1.0 else None
    undecodable = (
        (1.0 - margin) * log_mn / math.log(1.0 / ch.epsilon)
        if 0.0 < ch.epsilon < 1.0
        else None
    )
    return decodable, undecodable


class DistanceProfile(NamedTuple):
    """Moments of the pairwise row distance: the same-cluster mean, the
    extra separation per fully-disagreeing row, and the decision threshold
    mean + separation/3."""

    same_cluster_mean: float
    separation: float
    threshold: float


def distance_profile(ch: ChannelParams) -> DistanceProfile:
    """mu = 2p(1-p)(1-eps)^2, delta = (1-eps)^2 (1-2p)^2, d0 = mu + delta/3."""
    mu = 2.0 * ch.p * (1.0 - ch.p) * (1.0 - ch.epsilon) ** 2
    delta = (1.0 - ch.epsilon) ** 2 * (1.0 - 2.0 * ch.p) ** 2
    return DistanceProfile(mu, delta, mu + delta / 3.0)


def same_cluster_error_bound(n: int, ch: ChannelParams, alpha: float | None = None) -> float:
    """Chernoff bound exp(-delta^2 alpha^2 / (mu n)) on declaring two
    same-cluster rows different; alpha defaults to n/3."""
    mu, delta, _ = distance_profile(ch)
    alpha = n / 3.0 if alpha is None else alpha
    if mu == 0.0:
        return 0.0 if delta > 0.0 else 1.0
    return min(1.0, math.exp(-delta * delta * alpha * alpha / (mu * n)))


def diff_cluster_error_bound(
    n: int, disagreements: float, ch: ChannelParams, alpha: float | None = None
) -> float:
    """Chernoff bound on declaring two different-cluster rows the same,
    given they truly disagree in ``disagreements`` of the n columns.

    exp(-delta^2 (s - alpha)^2 / (6 (n mu + delta alpha))) for s >= alpha,
    and 1 below alpha (default n/3), where the bound gives nothing. The
    distance of such a pair averages mu + delta s/n: a mix of s columns
    disagreeing at rate (1-eps)^2 (p^2 + (1-p)^2) and n - s at rate mu.
    """
    mu, delta, _ = distance_profile(ch)
    alpha = n / 3.0 if alpha is None else alpha
    if disagreements < alpha or delta == 0.0:
        return 1.0
    denom = 6.0 * (n * mu + delta * alpha)
    if denom == 0.0:
        return 1.0
    gap = disagreements - alpha
    return min(1.0, math.exp(-delta * delta * gap * gap / denom))


def few_disagreements_bound(col_cluster_count: int) -> float:
    """Bound 2 exp(-t/54) on two independent rows disagreeing in at most a
    third of the columns, for t column clusters."""
    if col_cluster_count < 1:
        raise ValueError("column cluster count must be positive")
    return min(1.0, 2.0 * math.exp(-col_cluster_count / 54.0))


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def fixed_matrix_cluster_threshold(m: int, n: int, scale: float) -> float:
    """Cluster-size threshold scale * sqrt(mn ln(m) ln(n)) above which
    clustering a single fixed matrix succeeds asymptotically."""
    if m < 2 or n < 2:
        raise ValueError("need m, n >= 2")
    return scale * math.sqrt(m * n * math.log(m) * math.log(n))


class BoundValue(NamedTuple):
    value: float
    valid: bool


@dataclass(frozen=True)
class BoundsReport:
    """All closed-form quantities for one (matrix shape, channel) pair."""

    effective_flip_rate: BoundValue
    pe_lower: BoundValue
    pe_upper: BoundValue
    exp_lower: BoundValue
    exp_upper: BoundValue
    simple_lower: BoundValue
    simple_upper: BoundValue
    decodable_min_size: BoundValue
    undecodable_max_size: BoundValue


def bounds_report(
    sizes: ClusterSizeHistogram, m: int, n: int, ch: ChannelParams, margin: float = 0.5
) -> BoundsReport:
    """Evaluate every bound for the given cluster-size histogram."""
    lower, upper = decoding_error_bounds(sizes, ch)
    exp_lower, exp_upper, exp_valid = exponential_error_bounds(sizes, ch)
    simple_lower, simple_upper, simple_valid = extremal_size_error_bounds(
        sizes.s_min, sizes.s_max, m, n, ch
    )
    decodable, undecodable = recovery_size_thresholds(m, n, ch, margin)
    return BoundsReport(
        effective_flip_rate=BoundValue(effective_flip_rate(ch), True),
        pe_lower=BoundValue(lower, True),
        pe_upper=BoundValue(upper, True),
        exp_lower=BoundValue(exp_lower, True),
        exp_upper=BoundValue(exp_upper, exp_valid),
        simple_lower=BoundValue(simple_lower, True),
        simple_upper=BoundValue(simple_upper, simple_valid),
        decodable_min_size=BoundValue(
            decodable if decodable is not None else math.nan, decodable is not None
        ),
        undecodable_max_size=BoundValue(
            undecodable if undecodable is not None else math.nan, undecodable is not None
        ),
    )
