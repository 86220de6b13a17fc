import math

import numpy as np
import pytest

from blockrec.bounds import (
    BoundsReport,
    ClusterSizeHistogram,
    any_cluster_error_prob,
    binary_entropy,
    bounds_report,
    decoding_error_bounds,
    diff_cluster_error_bound,
    distance_profile,
    effective_flip_rate,
    exponential_error_bounds,
    extremal_size_error_bounds,
    few_disagreements_bound,
    fixed_matrix_cluster_threshold,
    recovery_size_thresholds,
    same_cluster_error_bound,
)
from blockrec.decoder import exact_error_prob
from blockrec.model import ChannelParams, TiePolicy, validate_partition


def hist(*sizes):
    return ClusterSizeHistogram.from_sizes(sizes)


def test_flip_rate_examples():
    assert effective_flip_rate(ChannelParams(0.0, 0.0)) == 0.0
    assert effective_flip_rate(ChannelParams(0.5, 0.5)) == pytest.approx(1.0, abs=1e-15)
    assert effective_flip_rate(ChannelParams(0.5, 0.1)) == pytest.approx(0.8, abs=1e-15)


def test_flip_rate_range_and_zero_condition():
    for eps in np.linspace(0, 1, 11):
        for p in np.linspace(0, 0.5, 11):
            rate = effective_flip_rate(ChannelParams(eps, p))
            assert eps - 1e-15 <= rate <= 1.0 + 1e-15
            if p == 0:
                assert rate == pytest.approx(eps, abs=1e-15)
            elif eps < 1:
                assert rate > eps


def test_any_cluster_error_prob_values():
    assert any_cluster_error_prob(0.0, hist(3, 4)) == 0.0
    assert any_cluster_error_prob(0.5, hist(1)) == pytest.approx(0.5, abs=1e-15)
    assert any_cluster_error_prob(0.5, hist(2, 2, 2, 2)) == pytest.approx(0.68359375, abs=1e-15)
    assert any_cluster_error_prob(1.0, hist(5)) == 1.0
    with pytest.raises(ValueError):
        any_cluster_error_prob(1.5, hist(1))


def test_any_cluster_error_prob_monotone():
    values = [any_cluster_error_prob(u, hist(2, 3)) for u in np.linspace(0, 1, 21)]
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))
    # more clusters of a given size can only increase the failure chance
    for count in range(1, 6):
        a = any_cluster_error_prob(0.3, ClusterSizeHistogram({2: count}))
        b = any_cluster_error_prob(0.3, ClusterSizeHistogram({2: count + 1}))
        assert b >= a


def test_decoding_error_bounds_examples():
    sizes = hist(2, 2, 2, 2)
    lower, upper = decoding_error_bounds(sizes, ChannelParams(0.5, 0.1))
    assert lower == pytest.approx(0.68359375, abs=1e-15)
    assert upper == pytest.approx(0.98320384, abs=1e-12)
    # p = 0 collapses the sandwich
    lower, upper = decoding_error_bounds(sizes, ChannelParams(0.3, 0.0))
    assert lower == upper
    lower, upper = decoding_error_bounds(sizes, ChannelParams(1.0, 0.2))
    assert (lower, upper) == (1.0, 1.0)


def test_exponential_bounds_values_and_validity():
    sizes = hist(2, 2, 2, 2)
    lower, upper, valid = exponential_error_bounds(sizes, ChannelParams(0.5, 0.0))
    assert lower == pytest.approx(0.6321205588285577, abs=1e-15)
    assert valid  # flip rate 0.5, floor = 1 size
    lower, upper, valid = exponential_error_bounds(sizes, ChannelParams(0.0, 0.3))
    assert lower == 0.0
    # flip rate 0.8 needs sizes >= ln2/ln(1/0.8) = 3.106..., so size 2 fails
    _, _, valid = exponential_error_bounds(sizes, ChannelParams(0.5, 0.1))
    assert not valid
    _, _, valid = exponential_error_bounds(hist(4, 4), ChannelParams(0.5, 0.1))
    assert valid
    # flip rate 1 leaves the floor undefined
    _, _, valid = exponential_error_bounds(hist(50), ChannelParams(0.2, 0.5))
    assert not valid


def test_extremal_size_bounds():
    lower, upper, valid = extremal_size_error_bounds(16, 16, 100, 100, ChannelParams(0.5, 0.0))
    assert lower == pytest.approx(0.009491412645261271, abs=1e-15)
    assert valid
    with pytest.raises(ValueError):
        extremal_size_error_bounds(0, 4, 10, 10, ChannelParams(0.5, 0.0))
    with pytest.raises(ValueError):
        extremal_size_error_bounds(5, 4, 10, 10, ChannelParams(0.5, 0.0))


def test_exponential_bounds_at_least_as_tight_as_extremal():
    # equal-size clusters make the two forms coincide; mixed sizes make the
    # extremal form strictly looser
    for eps, p in [(0.3, 0.05), (0.5, 0.1), (0.7, 0.0)]:
        ch = ChannelParams(eps, p)
        equal = hist(*[4] * 8)
        lo1, up1, _ = exponential_error_bounds(equal, ch)
        lo2, up2, _ = extremal_size_error_bounds(4, 4, 8, 4, ch)
        assert lo1 >= lo2 - 1e-12
        assert up1 <= up2 + 1e-12
        mixed = hist(2, 3, 5)
        lo1, up1, _ = exponential_error_bounds(mixed, ch)
        lo2, up2, _ = extremal_size_error_bounds(2, 5, 2, 5, ch)
        assert lo1 >= lo2 - 1e-12
        assert up1 <= up2 + 1e-12


def test_recovery_size_thresholds():
    dec, und = recovery_size_thresholds(1000, 1000, ChannelParams(0.5, 0.1), margin=0.5)
    assert dec == pytest.approx(61.913106951097014, rel=1e-12)
    assert und == pytest.approx(9.965784284662087, rel=1e-12)
    # at p = 0 and vanishing margin the two thresholds coincide
    dec, und = recovery_size_thresholds(1000, 1000, ChannelParams(0.5, 0.0), margin=1e-9)
    assert dec == pytest.approx(und, rel=1e-6)
    dec, und = recovery_size_thresholds(100, 100, ChannelParams(0.0, 0.0))
    assert dec is None and und is None
    dec, und = recovery_size_thresholds(100, 100, ChannelParams(1.0, 0.1))
    assert dec is None and und is None
    with pytest.raises(ValueError):
        recovery_size_thresholds(10, 10, ChannelParams(0.5, 0.1), margin=0.0)


def test_distance_profile_values():
    assert distance_profile(ChannelParams(0.0, 0.0)) == pytest.approx((0.0, 1.0, 1 / 3))
    mu, delta, d0 = distance_profile(ChannelParams(0.5, 0.1))
    assert mu == pytest.approx(0.045, abs=1e-15)
    assert delta == pytest.approx(0.16, abs=1e-15)
    assert d0 == pytest.approx(0.045 + 0.16 / 3, abs=1e-15)
    mu, delta, d0 = distance_profile(ChannelParams(0.2, 0.5))
    assert delta == 0.0
    assert d0 == mu


def test_same_cluster_error_bound():
    ch = ChannelParams(0.5, 0.1)
    assert same_cluster_error_bound(1000, ch) == pytest.approx(3.534267487011766e-28, rel=1e-12)
    assert same_cluster_error_bound(9, ch) == pytest.approx(0.5661541495171974, rel=1e-12)
    assert same_cluster_error_bound(100, ChannelParams(0.2, 0.5)) == 1.0  # no separation
    assert same_cluster_error_bound(100, ChannelParams(0.0, 0.0)) == 0.0  # no same-cluster noise


def test_diff_cluster_error_bound():
    ch = ChannelParams(0.5, 0.1)
    n = 1200
    assert diff_cluster_error_bound(n, n / 3, ch) == 1.0  # zero exponent at the boundary
    assert diff_cluster_error_bound(n, n / 4, ch) == 1.0  # below the useful regime
    assert diff_cluster_error_bound(n, n / 2, ch) == pytest.approx(
        0.23543328804056732, rel=1e-12
    )
    assert diff_cluster_error_bound(100, 90, ChannelParams(0.2, 0.5)) == 1.0


def test_few_disagreements_bound():
    assert few_disagreements_bound(54) == pytest.approx(0.7357588823428847, rel=1e-12)
    assert few_disagreements_bound(1) == 1.0
    assert few_disagreements_bound(10_000) < 1e-70
    with pytest.raises(ValueError):
        few_disagreements_bound(0)


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(4 / 9) == pytest.approx(0.9910760598382222, rel=1e-12)
    with pytest.raises(ValueError):
        binary_entropy(1.2)


def test_fixed_matrix_cluster_threshold():
    assert fixed_matrix_cluster_threshold(1024, 1024, 1.0) == pytest.approx(
        7097.82712893384, rel=1e-12
    )
    n = 500
    assert fixed_matrix_cluster_threshold(n, n, 1.0) == pytest.approx(n * math.log(n), rel=1e-12)
    assert fixed_matrix_cluster_threshold(16, 64, 0.0) == 0.0
    with pytest.raises(ValueError):
        fixed_matrix_cluster_threshold(1, 10, 1.0)


def test_histogram_from_partitions():
    rows = validate_partition([0, 0, 1, 1, 1])
    cols = validate_partition([0, 1, 1])
    sizes = ClusterSizeHistogram.from_partitions(rows, cols)
    assert sizes.total_entries == 15
    assert sizes.counts == {2: 1, 3: 1, 4: 1, 6: 1}
    assert sizes.s_min == 2
    assert sizes.s_max == 6
    with pytest.raises(ValueError):
        ClusterSizeHistogram({})
    with pytest.raises(ValueError):
        ClusterSizeHistogram({0: 3})


def test_bounds_report_invariants():
    for eps in (0.1, 0.5, 0.9):
        for p in (0.0, 0.1, 0.4):
            report = bounds_report(hist(*[4] * 8), 8, 4, ChannelParams(eps, p))
            assert isinstance(report, BoundsReport)
            assert report.pe_lower.value <= report.pe_upper.value + 1e-15
            if report.exp_upper.valid:
                assert report.exp_lower.value <= report.exp_upper.value + 1e-15
            for field in ("pe_lower", "pe_upper", "exp_lower", "exp_upper"):
                value = getattr(report, field).value
                assert -1e-15 <= value <= 1.0 + 1e-15


def test_exponential_bounds_sandwich_exact_probability():
    # where the size hypothesis holds, the exponential bounds must bracket
    # the exact ties-as-errors error probability
    for eps in (0.1, 0.3, 0.5):
        for p in (0.0, 0.05, 0.1):
            ch = ChannelParams(eps, p)
            sizes = [6] * 9
            lower, upper, valid = exponential_error_bounds(hist(*sizes), ch)
            if not valid:
                continue
            pe = exact_error_prob(sizes, ch, TiePolicy.COUNT_AS_ERROR)
            assert lower <= pe + 1e-12
            assert pe <= upper + 1e-12
