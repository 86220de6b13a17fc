"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``. Monte Carlo criteria use
fixed master seeds, so outcomes are reproducible bit for bit.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from blockrec.bounds import (
    ClusterSizeHistogram,
    any_cluster_error_prob,
    distance_profile,
    effective_flip_rate,
    exponential_error_bounds,
    extremal_size_error_bounds,
    recovery_size_thresholds,
)
from blockrec.channel import transmit
from blockrec.clusterer import cluster_axis, distance_matrix, pairwise_distance, partition_match
from blockrec.decoder import exact_error_prob
from blockrec.experiment import (
    ExperimentConfig,
    Mode,
    estimate_error_rates,
    run_single,
    sweep,
    trial_streams,
)
from blockrec.formats import write_results_csv
from blockrec.generator import cluster_merge_prob_bound, sample_block_matrix
from blockrec.model import ChannelParams, GenerationLaw, TiePolicy

from oracles import degenerate_table_fraction

FAIR = TiePolicy.FAIR_COIN
AS_ERROR = TiePolicy.COUNT_AS_ERROR

EPS_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
P_GRID = (0.0, 0.05, 0.1, 0.25, 0.4)
SIZE_CONFIGS = (
    ("1x(s=1)", [1]),
    ("4x(s=2)", [2] * 4),
    ("16x(s=8)", [8] * 16),
    ("mixed{2,3,5}", [2, 3, 5]),
)
SLACK = 1e-12
WORKERS = 2


def _report(num: int, ok: bool, detail: str):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_exact_sandwich():
    start = time.perf_counter()
    worst = 0.0
    for eps in EPS_GRID:
        for p in P_GRID:
            ch = ChannelParams(eps, p)
            rate = effective_flip_rate(ch)
            for _, sizes in SIZE_CONFIGS:
                hist = ClusterSizeHistogram.from_sizes(sizes)
                floor = any_cluster_error_prob(eps, hist)
                ceiling = any_cluster_error_prob(rate, hist)
                pe_err = exact_error_prob(sizes, ch, AS_ERROR)
                pe_fair = exact_error_prob(sizes, ch, FAIR)
                worst = max(
                    worst, floor - pe_err, pe_err - ceiling, pe_fair - ceiling
                )
    elapsed = time.perf_counter() - start
    _report(
        1,
        worst <= SLACK and elapsed < 1.0,
        f"max sandwich violation {worst:.3g} over 100 grid points, {elapsed:.2f}s",
    )


def test_criterion_2_erasure_only_equalities():
    start = time.perf_counter()
    worst = 0.0
    for eps in EPS_GRID:
        ch = ChannelParams(eps, 0.0)
        for _, sizes in SIZE_CONFIGS:
            hist = ClusterSizeHistogram.from_sizes(sizes)
            pe_err = exact_error_prob(sizes, ch, AS_ERROR)
            worst = max(worst, abs(pe_err - any_cluster_error_prob(eps, hist)))
            pe_fair = exact_error_prob(sizes, ch, FAIR)
            half_tie = 1.0 - math.prod(1.0 - eps**s / 2.0 for s in sizes)
            worst = max(worst, abs(pe_fair - half_tie))
    elapsed = time.perf_counter() - start
    _report(
        2,
        worst <= SLACK and elapsed < 1.0,
        f"max equality gap {worst:.3g}, {elapsed:.2f}s",
    )


def test_criterion_3_monte_carlo_matches_exact():
    start = time.perf_counter()
    law = GenerationLaw(12, 12, 3, 3)
    ch = ChannelParams(0.5, 0.1)
    trials = 100_000
    details = []
    ok = True
    for tie in (FAIR, AS_ERROR):
        exact = exact_error_prob([9] * 16, ch, tie)
        cfg = ExperimentConfig(law=law, ch=ch, tie=tie, mode=Mode.KNOWN_CLUSTERS,
                               trials=trials, master_seed=30_001)
        est = estimate_error_rates(cfg, workers=WORKERS)["decode_error"]
        half_width = (est.ci_high - est.ci_low) / 2
        gap = abs(est.rate - exact)
        ok = ok and gap <= 3 * half_width
        details.append(f"{tie.value}: |{est.rate:.5f}-{exact:.5f}|={gap:.5f} vs 3hw={3*half_width:.5f}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    _report(3, ok, "; ".join(details) + f", {elapsed:.0f}s")


def test_criterion_4_exponential_bound_consistency():
    worst_bracket = 0.0
    worst_tight = 0.0
    checked = 0
    for eps in EPS_GRID:
        for p in P_GRID:
            ch = ChannelParams(eps, p)
            for _, sizes in SIZE_CONFIGS:
                uniform = len(set(sizes)) == 1
                hist = ClusterSizeHistogram.from_sizes(sizes)
                lower, upper, valid = exponential_error_bounds(hist, ch)
                if not valid or not uniform:
                    continue
                checked += 1
                pe = exact_error_prob(sizes, ch, AS_ERROR)
                worst_bracket = max(worst_bracket, lower - pe, pe - upper)
                # equal-size clusters on a shape with mn = (#clusters) * size
                m, n = len(sizes), hist.s_max
                s_lower, s_upper, _ = extremal_size_error_bounds(hist.s_min, hist.s_max, m, n, ch)
                worst_tight = max(worst_tight, s_lower - lower, upper - s_upper)
    _report(
        4,
        worst_bracket <= SLACK and worst_tight <= SLACK and checked > 0,
        f"{checked} valid equal-size configs, max bracket violation {worst_bracket:.3g}, "
        f"max tightness violation {worst_tight:.3g}",
    )


def test_criterion_5_cluster_size_phase_transition():
    start = time.perf_counter()
    ch = ChannelParams(0.5, 0.05)
    decodable, undecodable = recovery_size_thresholds(1024, 1024, ch, margin=0.5)
    assert decodable == pytest.approx(41.836, abs=0.01)
    assert 64 > decodable and 8 < undecodable
    rates = {}
    for size in (64, 8):
        m0, n0 = (8, 8) if size == 64 else (2, 4)
        cfg = ExperimentConfig(
            law=GenerationLaw(1024, 1024, m0, n0), ch=ch, tie=FAIR,
            mode=Mode.KNOWN_CLUSTERS, trials=200, master_seed=50_000 + size)
        rates[size] = estimate_error_rates(cfg, workers=WORKERS)["decode_error"].rate
    elapsed = time.perf_counter() - start
    ok = rates[64] <= 0.05 and rates[8] >= 0.95 and elapsed < 600.0
    _report(
        5,
        ok,
        f"error rate {rates[64]:.3f} at size 64 (threshold {decodable:.1f}), "
        f"{rates[8]:.3f} at size 8, {elapsed:.0f}s",
    )


def test_criterion_6_clustering_recovery_at_desk_scale():
    # 1024 x 1024, 32 x 32 clusters, eps = 0.3, p = 0.1: the pinned threshold
    # rule cannot separate row-cluster pairs that agree on more than two
    # thirds of the column clusters, so exact recovery is not reachable at
    # this size; the criterion is asserted as stated and fails honestly.
    start = time.perf_counter()
    law = GenerationLaw(1024, 1024, 32, 32)
    ch = ChannelParams(0.3, 0.1)
    threshold = distance_profile(ch).threshold
    trials = 100
    exact = 0
    decision_errors = []
    rng_master = 60_006
    upper = np.triu_indices(law.m, 1)
    for index in range(trials):
        gen_rng, chan_rng, _ = trial_streams(rng_master, index)
        X = sample_block_matrix(law, gen_rng)
        Y = transmit(X, ch, chan_rng)
        part = cluster_axis(Y, threshold, "rows")
        exact += partition_match(part, X.row_partition)
        dist = distance_matrix(Y, "rows")
        same_true = X.row_partition.labels[:, None] == X.row_partition.labels[None, :]
        decision_errors.append(int(((dist < threshold)[upper] != same_true[upper]).sum()))
    rate = exact / trials
    elapsed = time.perf_counter() - start
    _report(
        6,
        rate >= 0.9 and elapsed < 900.0,
        f"exact row recovery rate {rate:.2f} over {trials} trials; mean per-pair "
        f"decision errors {np.mean(decision_errors):.0f} of {law.m * (law.m - 1) // 2} "
        f"(threshold {threshold:.4f} sits below the distance mean of cross pairs that "
        f"agree on over 2/3 of column clusters), {elapsed:.0f}s",
    )


def test_criterion_7_conditional_distance_means():
    n, s_ij = 200, 60
    base = np.zeros(n, dtype=np.int8)
    other = base.copy()
    other[:s_ij] = 1
    X = np.stack([base, base, base, other])
    ch = ChannelParams(0.3, 0.2)
    mu, delta, _ = distance_profile(ch)
    rng = np.random.default_rng(70_007)
    draws = 10_000
    same = np.empty(draws)
    cross = np.empty(draws)
    for k in range(draws):
        Y = transmit(X, ch, rng)
        same[k] = pairwise_distance(Y, 0, 1)
        cross[k] = pairwise_distance(Y, 2, 3)
    same_gap = abs(same.mean() - mu)
    same_limit = 3 * same.std(ddof=1) / math.sqrt(draws)
    cross_expected = mu + delta * s_ij / n
    cross_gap = abs(cross.mean() - cross_expected)
    cross_limit = 3 * cross.std(ddof=1) / math.sqrt(draws)
    _report(
        7,
        same_gap <= same_limit and cross_gap <= cross_limit,
        f"same-cluster gap {same_gap:.2g} (limit {same_limit:.2g}), "
        f"cross gap {cross_gap:.2g} (limit {cross_limit:.2g})",
    )


def test_criterion_8_degenerate_draw_probability():
    start = time.perf_counter()
    # exhaustive enumeration over the 16 possible 2x2 block tables: 4 have
    # equal rows, 4 equal columns, 2 both, so 6/16 = 0.375 are degenerate
    expected = float(degenerate_table_fraction(2, 2))
    assert expected == 0.375
    bound = cluster_merge_prob_bound(2, 2)
    cfg = ExperimentConfig(
        law=GenerationLaw(2, 2, 1, 1), ch=ChannelParams(0.5, 0.1), tie=AS_ERROR,
        mode=Mode.KNOWN_CLUSTERS, trials=1_000_000, master_seed=80_008)
    rate = estimate_error_rates(cfg, workers=WORKERS)["degenerate"].rate
    elapsed = time.perf_counter() - start
    ok = abs(rate - expected) <= 0.002 and rate <= bound
    _report(
        8,
        ok,
        f"rate {rate:.4f} vs enumeration {expected} (union bound {bound}), {elapsed:.0f}s",
    )


def test_criterion_9_byte_identical_reruns(tmp_path):
    cfg = ExperimentConfig(
        law=GenerationLaw(12, 12, 3, 3), ch=ChannelParams(0.5, 0.1), tie=FAIR,
        mode=Mode.KNOWN_CLUSTERS, trials=3000, master_seed=30_001)
    single = [run_single(cfg, workers=w) for w in (1, 2, 1)]
    swept = [sweep(cfg, "epsilon", [0.2, 0.5, 0.8], workers=w) for w in (1, 2)]
    blobs = []
    for i, rows in enumerate(single + swept):
        path = tmp_path / f"run{i}.csv"
        write_results_csv(rows, path)
        blobs.append(path.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2] and blobs[3] == blobs[4]
    _report(9, ok, "single-run and sweep CSVs identical across reruns and worker counts")
