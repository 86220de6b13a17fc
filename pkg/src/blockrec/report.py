"""Figure rendering for experiment result tables.

Figures are written next to the delimited output so a sweep leaves both a
CSV and its plots behind.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_AXIS_LABELS = {
    "m0n0": "cluster size (m0 * n0)",
    "epsilon": "erasure probability",
    "p": "flip probability",
    "n": "columns n",
    None: "run index",
}

_BOUND_SERIES = (
    ("pe_lower_bound", "error lower bound", "tab:green"),
    ("pe_upper_bound", "error upper bound", "tab:red"),
    ("exp_lower_bound", "exponential lower bound", "tab:olive"),
    ("exp_upper_bound", "exponential upper bound", "tab:purple"),
    ("simple_lower_bound", "extremal-size lower bound", "tab:cyan"),
    ("simple_upper_bound", "extremal-size upper bound", "tab:pink"),
)


def _axis_values(rows: list[dict], axis: str | None) -> list[float]:
    if axis == "m0n0":
        return [row["m0"] * row["n0"] for row in rows]
    if axis in ("epsilon", "p", "n"):
        return [row[axis] for row in rows]
    return list(range(len(rows)))


def _event_names(rows: list[dict]) -> list[str]:
    names = [key[: -len("_rate")] for key in rows[0] if key.endswith("_rate")]
    return [name for name in names if f"{name}_ci_low" in rows[0]]


def _threshold_lines(ax, rows: list[dict]):
    first = rows[0]
    for key, label in (
        ("decodable_min_size", "decodable size threshold"),
        ("undecodable_max_size", "undecodable size threshold"),
    ):
        value = first.get(key)
        if value is not None and value == value:  # skip NaN
            ax.axvline(value, linestyle=":", color="gray", alpha=0.8)
            ax.annotate(label, (value, 0.5), rotation=90, fontsize=7, ha="right", va="center")


def render_figures(rows: list[dict], axis: str | None, out_dir, stem: str = "results") -> list[str]:
    """Render the empirical-rate figure and the analytic-bound comparison
    figure for a result table; returns the written paths."""
    if not rows:
        return []
    os.makedirs(out_dir, exist_ok=True)
    x = _axis_values(rows, axis)
    xlabel = _AXIS_LABELS.get(axis, axis or "run index")
    paths = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in _event_names(rows):
        rates = [row[f"{name}_rate"] for row in rows]
        low = [row[f"{name}_rate"] - row[f"{name}_ci_low"] for row in rows]
        high = [row[f"{name}_ci_high"] - row[f"{name}_rate"] for row in rows]
        ax.errorbar(x, rates, yerr=[low, high], marker="o", capsize=3, label=name.replace("_", " "))
    for key, label, color in _BOUND_SERIES[:2]:
        ax.plot(x, [row[key] for row in rows], linestyle="--", color=color, alpha=0.8, label=label)
    if axis == "m0n0":
        _threshold_lines(ax, rows)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("event rate")
    ax.set_ylim(-0.03, 1.03)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    rate_path = os.path.join(out_dir, f"{stem}_rates.png")
    fig.savefig(rate_path, dpi=150)
    plt.close(fig)
    paths.append(rate_path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, label, color in _BOUND_SERIES:
        valid = [row[key] for row in rows]
        if all(v != v for v in valid):  # all NaN
            continue
        ax.plot(x, valid, marker=".", color=color, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("bound value")
    ax.set_ylim(-0.03, 1.03)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    bound_path = os.path.join(out_dir, f"{stem}_bounds.png")
    fig.savefig(bound_path, dpi=150)
    plt.close(fig)
    paths.append(bound_path)
    return paths
