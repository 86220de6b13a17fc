"""Command-line surface.

Exit codes: 0 on success, 1 on usage errors, 2 on I/O or file-format errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bounds as bd
from .channel import transmit
from .clusterer import cluster_pipeline
from .decoder import exact_error_prob, majority_decode
from .experiment import run_single, sweep
from .formats import (
    FormatError,
    read_config,
    read_labels,
    read_matrix,
    write_labels,
    write_matrix,
    write_results_csv,
)
from .generator import sample_block_matrix
from .model import ERASED, ChannelParams, GenerationLaw, TiePolicy


def _channel_args(parser):
    parser.add_argument("--eps", type=float, required=True, help="erasure probability")
    parser.add_argument("--p", type=float, required=True, help="bit-flip probability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockrec",
        description="Block-constant binary matrix recovery: generation, channel, decoding, clustering, bounds, and Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    gen = sub.add_parser("generate", help="sample a block-constant matrix")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m0", type=int, required=True, help="row cluster size")
    gen.add_argument("--n0", type=int, required=True, help="column cluster size")
    gen.add_argument("--no-permute", action="store_true", help="keep clusters contiguous")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output matrix file")
    gen.add_argument("--labels-out", help="prefix for <prefix>.rows / <prefix>.cols label files")
    gen.set_defaults(func=cmd_generate)

    chan = sub.add_parser("channel", help="erase and flip a bit matrix")
    _channel_args(chan)
    chan.add_argument("--seed", type=int, default=0)
    chan.add_argument("--in", dest="inp", required=True, help="input bit-matrix file")
    chan.add_argument("--out", required=True, help="output observed-matrix file")
    chan.set_defaults(func=cmd_channel)

    dec = sub.add_parser("decode", help="majority-decode with known clusters")
    dec.add_argument("--row-labels", required=True)
    dec.add_argument("--col-labels", required=True)
    dec.add_argument(
        "--tie", choices=[t.value for t in TiePolicy], default=TiePolicy.FAIR_COIN.value
    )
    dec.add_argument("--seed", type=int, default=0, help="seed for fair-coin tie breaks")
    dec.add_argument("--in", dest="inp", required=True)
    dec.add_argument("--out", required=True)
    dec.set_defaults(func=cmd_decode)

    clu = sub.add_parser("cluster", help="recover row and column clusters")
    _channel_args(clu)
    clu.add_argument("--in", dest="inp", required=True)
    clu.add_argument("--row-out", required=True)
    clu.add_argument("--col-out", required=True)
    clu.set_defaults(func=cmd_cluster)

    bnd = sub.add_parser("bounds", help="print the analytic bounds report")
    bnd.add_argument("--m", type=int, required=True)
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--m0", type=int, required=True)
    bnd.add_argument("--n0", type=int, required=True)
    _channel_args(bnd)
    bnd.add_argument("--delta", type=float, default=0.5, help="undecodable-threshold margin in (0,1)")
    bnd.set_defaults(func=cmd_bounds)

    pe = sub.add_parser("exact-pe", help="exact known-cluster error probability")
    pe.add_argument("--sizes", type=int, nargs="+", required=True, help="cluster sizes (multiset)")
    pe.add_argument("--counts", type=int, nargs="+", help="multiplicity per size (default 1 each)")
    _channel_args(pe)
    pe.set_defaults(func=cmd_exact_pe)

    exp = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    exp.add_argument("--config", required=True, help="experiment config file")
    exp.add_argument("--out", required=True, help="output CSV path")
    exp.add_argument("--workers", type=int, help="override the config worker count")
    exp.add_argument("--plots", help="directory for rendered figures (default: alongside the CSV)")
    exp.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    exp.set_defaults(func=cmd_experiment)
    return parser


def cmd_generate(args) -> int:
    law = GenerationLaw(args.m, args.n, args.m0, args.n0, permute=not args.no_permute)
    X = sample_block_matrix(law, np.random.default_rng(args.seed))
    write_matrix(X.to_dense(), args.out)
    if args.labels_out:
        write_labels(X.row_partition, f"{args.labels_out}.rows")
        write_labels(X.col_partition, f"{args.labels_out}.cols")
    return 0


def cmd_channel(args) -> int:
    matrix = read_matrix(args.inp)
    if np.any(matrix.entries == ERASED):
        raise FormatError(f"{args.inp}: channel input must not contain erasures")
    Y = transmit(matrix.entries, ChannelParams(args.eps, args.p), np.random.default_rng(args.seed))
    write_matrix(Y, args.out)
    return 0


def cmd_decode(args) -> int:
    Y = read_matrix(args.inp)
    rows = read_labels(args.row_labels)
    cols = read_labels(args.col_labels)
    estimate, _ = majority_decode(
        Y, rows, cols, TiePolicy(args.tie), np.random.default_rng(args.seed)
    )
    write_matrix(estimate.to_dense(), args.out)
    return 0


def cmd_cluster(args) -> int:
    Y = read_matrix(args.inp)
    rows, cols = cluster_pipeline(Y, ChannelParams(args.eps, args.p))
    write_labels(rows, args.row_out)
    write_labels(cols, args.col_out)
    return 0


def cmd_bounds(args) -> int:
    law = GenerationLaw(args.m, args.n, args.m0, args.n0)
    sizes = bd.ClusterSizeHistogram({law.m0 * law.n0: law.r * law.t})
    report = bd.bounds_report(sizes, law.m, law.n, ChannelParams(args.eps, args.p), args.delta)
    for name in (
        "effective_flip_rate",
        "pe_lower",
        "pe_upper",
        "exp_lower",
        "exp_upper",
        "simple_lower",
        "simple_upper",
        "decodable_min_size",
        "undecodable_max_size",
    ):
        value = getattr(report, name)
        note = "" if value.valid else "  (hypothesis not satisfied)"
        print(f"{name} = {value.value:.12g}{note}")
    return 0


def cmd_exact_pe(args) -> int:
    counts = args.counts if args.counts else [1] * len(args.sizes)
    if len(counts) != len(args.sizes):
        raise ValueError("--counts must match --sizes in length")
    sizes = [s for s, c in zip(args.sizes, counts) for _ in range(c)]
    ch = ChannelParams(args.eps, args.p)
    for tie in TiePolicy:
        print(f"{tie.value} = {exact_error_prob(sizes, ch, tie):.12g}")
    return 0


def cmd_experiment(args) -> int:
    run = read_config(args.config)
    workers = args.workers if args.workers is not None else run.workers
    if run.sweep_axis is not None:
        rows = sweep(run.config, run.sweep_axis, run.sweep_values, workers)
    else:
        rows = run_single(run.config, workers)
    write_results_csv(rows, args.out)
    print(f"wrote {args.out}")
    if not args.no_plots:
        from .report import render_figures

        out_dir = args.plots or os.path.dirname(os.path.abspath(args.out))
        stem = os.path.splitext(os.path.basename(args.out))[0]
        for path in render_figures(rows, run.sweep_axis, out_dir, stem):
            print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
