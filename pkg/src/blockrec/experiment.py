"""Seeded Monte Carlo harness: per-trial pipelines, event-rate estimation
with Wilson intervals, and parameter sweeps with analytic bounds attached.

Every trial derives its own random streams from (master_seed, trial_index),
so estimates are bit-identical across runs and across worker counts, and a
sweep row can be reproduced in isolation.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, replace
from enum import Enum
from functools import partial

import numpy as np

from .bounds import BoundsReport, ClusterSizeHistogram, bounds_report, distance_profile
from .channel import transmit
from .clusterer import cluster_axis, partition_match, pairwise_error_count
from .decoder import majority_decode
from .generator import is_degenerate, sample_block_matrix
from .model import ChannelParams, GenerationLaw, TiePolicy
from .seeding import derive_seed, stream


class Mode(str, Enum):
    KNOWN_CLUSTERS = "known_clusters"
    CLUSTERING_ONLY = "clustering_only"
    FULL_PIPELINE = "full_pipeline"


# Events recorded per mode, in fixed report order.
EVENTS_BY_MODE = {
    Mode.KNOWN_CLUSTERS: ("decode_error", "tie_occurred", "degenerate"),
    Mode.CLUSTERING_ONLY: ("row_cluster_error", "col_cluster_error", "row_pairwise", "degenerate"),
    Mode.FULL_PIPELINE: (
        "decode_error",
        "row_cluster_error",
        "col_cluster_error",
        "row_pairwise",
        "tie_occurred",
        "degenerate",
    ),
}

SWEEP_AXES = ("m0n0", "epsilon", "p", "n")


@dataclass(frozen=True)
class ExperimentConfig:
    law: GenerationLaw
    ch: ChannelParams
    tie: TiePolicy
    mode: Mode
    trials: int
    master_seed: int
    aspect_beta: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.aspect_beta is not None and self.aspect_beta <= 0:
            raise ValueError("aspect_beta must be positive")


@dataclass(frozen=True)
class TrialResult:
    decode_error: bool
    row_cluster_exact: bool
    col_cluster_exact: bool
    row_pairwise_errors: int
    degenerate: bool
    tie_occurred: bool


@dataclass(frozen=True)
class ErrorEstimate:
    successes: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, successes: int, trials: int, z: float = 1.96) -> "ErrorEstimate":
        low, high = wilson_interval(successes, trials, z)
        return cls(successes, trials, successes / trials, low, high)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial rate, clamped to [0, 1]."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be between 0 and trials")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return max(0.0, center - margin), min(1.0, center + margin)


def trial_streams(master_seed: int, trial_index: int):
    """Generation, channel, and tie-break streams for one trial."""
    base = derive_seed(master_seed, trial_index)
    return stream(base, 0), stream(base, 1), stream(base, 2)


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialResult:
    """Sample a fresh matrix, transmit it, and run the configured pipeline.

    Under COUNT_AS_ERROR a tied cluster counts as a decoding error even when
    the emitted placeholder value happens to coincide with the truth; this is
    what makes the empirical rate comparable to the exact error probability.
    """
    gen_rng, chan_rng, tie_rng = trial_streams(cfg.master_seed, trial_index)
    X = sample_block_matrix(cfg.law, gen_rng)
    degenerate = is_degenerate(X)
    Y = transmit(X, cfg.ch, chan_rng)

    decode_error = False
    tie_occurred = False
    row_exact = True
    col_exact = True
    row_pairwise = 0

    if cfg.mode is Mode.KNOWN_CLUSTERS:
        estimate, tie_occurred = majority_decode(
            Y, X.row_partition, X.col_partition, cfg.tie, tie_rng
        )
        decode_error = not np.array_equal(estimate.block_values, X.block_values)
        if cfg.tie is TiePolicy.COUNT_AS_ERROR:
            decode_error = decode_error or tie_occurred
    else:
        threshold = distance_profile(cfg.ch).threshold
        est_rows = cluster_axis(Y, threshold, "rows")
        est_cols = cluster_axis(Y, threshold, "columns")
        row_exact = partition_match(est_rows, X.row_partition)
        col_exact = partition_match(est_cols, X.col_partition)
        row_pairwise = pairwise_error_count(est_rows, X.row_partition)
        if cfg.mode is Mode.FULL_PIPELINE:
            estimate, tie_occurred = majority_decode(Y, est_rows, est_cols, cfg.tie, tie_rng)
            decode_error = not np.array_equal(estimate.to_dense(), X.to_dense())
            if cfg.tie is TiePolicy.COUNT_AS_ERROR:
                decode_error = decode_error or tie_occurred

    return TrialResult(decode_error, row_exact, col_exact, row_pairwise, degenerate, tie_occurred)


def _run_trials(cfg: ExperimentConfig, workers: int) -> list[TrialResult]:
    indices = range(cfg.trials)
    if workers <= 1:
        return [run_trial(cfg, i) for i in indices]
    chunk = max(1, cfg.trials // (workers * 8))
    with multiprocessing.get_context().Pool(workers) as pool:
        return pool.map(partial(run_trial, cfg), indices, chunksize=chunk)


def _event_counts(cfg: ExperimentConfig, results: list[TrialResult]) -> dict[str, tuple[int, int]]:
    total = len(results)
    pairs = cfg.law.m * (cfg.law.m - 1) // 2
    counts = {
        "decode_error": (sum(r.decode_error for r in results), total),
        "row_cluster_error": (sum(not r.row_cluster_exact for r in results), total),
        "col_cluster_error": (sum(not r.col_cluster_exact for r in results), total),
        "row_pairwise": (sum(r.row_pairwise_errors for r in results), total * pairs),
        "tie_occurred": (sum(r.tie_occurred for r in results), total),
        "degenerate": (sum(r.degenerate for r in results), total),
    }
    return {name: counts[name] for name in EVENTS_BY_MODE[cfg.mode]}


def estimate_error_rates(cfg: ExperimentConfig, workers: int = 1) -> dict[str, ErrorEstimate]:
    """Run all trials and aggregate each recorded event, merged by trial
    index so the result does not depend on the worker count."""
    results = _run_trials(cfg, workers)
    return {
        name: ErrorEstimate.from_counts(successes, trials)
        for name, (successes, trials) in _event_counts(cfg, results).items()
    }


def cluster_dims_for_size(m: int, n: int, size: int) -> tuple[int, int]:
    """Most-square factorization of a joint cluster size into (m0, n0) with
    m0 | m and n0 | n; ties go to the smaller m0."""
    best = None
    for m0 in range(1, min(m, size) + 1):
        if m % m0 or size % m0:
            continue
        n0 = size // m0
        if n0 > n or n % n0:
            continue
        key = (abs(math.log(m0) - math.log(n0)), m0)
        if best is None or key < best[0]:
            best = (key, (m0, n0))
    if best is None:
        raise ValueError(f"no divisor pair of {m}x{n} yields cluster size {size}")
    return best[1]


def _apply_axis(cfg: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    law, ch = cfg.law, cfg.ch
    if axis == "epsilon":
        return replace(cfg, ch=ChannelParams(float(value), ch.p))
    if axis == "p":
        return replace(cfg, ch=ChannelParams(ch.epsilon, float(value)))
    if axis == "n":
        n = int(value)
        m = law.m if cfg.aspect_beta is None else round(cfg.aspect_beta * n)
        return replace(cfg, law=GenerationLaw(m, n, law.m0, law.n0, law.permute))
    if axis == "m0n0":
        m0, n0 = cluster_dims_for_size(law.m, law.n, int(value))
        return replace(cfg, law=GenerationLaw(law.m, law.n, m0, n0, law.permute))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def _report_for(cfg: ExperimentConfig, margin: float) -> BoundsReport:
    law = cfg.law
    sizes = ClusterSizeHistogram({law.m0 * law.n0: law.r * law.t})
    return bounds_report(sizes, law.m, law.n, cfg.ch, margin)


def result_row(
    cfg: ExperimentConfig, estimates: dict[str, ErrorEstimate], margin: float = 0.5
) -> dict:
    """One result-table row: parameters, event estimates, analytic bounds."""
    law = cfg.law
    row = {
        "m": law.m,
        "n": law.n,
        "m0": law.m0,
        "n0": law.n0,
        "epsilon": cfg.ch.epsilon,
        "p": cfg.ch.p,
        "tie": cfg.tie.value,
        "mode": cfg.mode.value,
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
    }
    for name in EVENTS_BY_MODE[cfg.mode]:
        est = estimates[name]
        row[f"{name}_rate"] = est.rate
        row[f"{name}_ci_low"] = est.ci_low
        row[f"{name}_ci_high"] = est.ci_high
        row[f"{name}_trials"] = est.trials
    report = _report_for(cfg, margin)
    row["effective_flip_rate"] = report.effective_flip_rate.value
    row["pe_lower_bound"] = report.pe_lower.value
    row["pe_upper_bound"] = report.pe_upper.value
    row["exp_lower_bound"] = report.exp_lower.value
    row["exp_upper_bound"] = report.exp_upper.value
    row["exp_upper_valid"] = int(report.exp_upper.valid)
    row["simple_lower_bound"] = report.simple_lower.value
    row["simple_upper_bound"] = report.simple_upper.value
    row["decodable_min_size"] = report.decodable_min_size.value
    row["undecodable_max_size"] = report.undecodable_max_size.value
    return row


def run_single(cfg: ExperimentConfig, workers: int = 1, margin: float = 0.5) -> list[dict]:
    """One-row result table for a single configuration."""
    return [result_row(cfg, estimate_error_rates(cfg, workers), margin)]


def sweep(
    cfg: ExperimentConfig,
    axis: str,
    values,
    workers: int = 1,
    margin: float = 0.5,
) -> list[dict]:
    """Run one configuration per axis value and tabulate the results.

    Each value gets its own master seed, derived from (cfg.master_seed,
    value index), so rows are independent and individually reproducible.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    rows = []
    for index, value in enumerate(values):
        point = _apply_axis(cfg, axis, value)
        point = replace(point, master_seed=derive_seed(cfg.master_seed, index))
        rows.append(result_row(point, estimate_error_rates(point, workers), margin))
    return rows
