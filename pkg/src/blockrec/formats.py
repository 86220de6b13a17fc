"""Bit-exact file formats: matrices, cluster labels, experiment configs,
and result CSVs. All files use LF newlines; numbers are printed with 12
significant digits so results are reproducible from the files alone."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .experiment import SWEEP_AXES, ExperimentConfig, Mode
from .model import ERASED, ChannelParams, GenerationLaw, ObservedMatrix, Partition, TiePolicy, validate_partition


class FormatError(ValueError):
    """A malformed input file; the message names the file location."""


_MATRIX_CHARS = {"0": 0, "1": 1, "e": ERASED}
_CHAR_FOR = {0: "0", 1: "1", ERASED: "e"}


def read_matrix(path) -> ObservedMatrix:
    """Read a matrix file: header line ``m n``, then m lines of n characters
    from {0, 1, e}."""
    with open(path, encoding="ascii", newline="") as fh:
        lines = fh.read().split("\n")
    header = lines[0].split(" ") if lines else []
    if len(header) != 2:
        raise FormatError(f"{path}:1: header must be 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"{path}:1: header must be two integers") from None
    if m < 1 or n < 1:
        raise FormatError(f"{path}:1: dimensions must be positive")
    if len(lines) < m + 1:
        raise FormatError(f"{path}: expected {m} matrix lines, found {len(lines) - 1}")
    entries = np.empty((m, n), dtype=np.int8)
    for i in range(m):
        line = lines[1 + i]
        if len(line) != n:
            raise FormatError(f"{path}:{i + 2}: expected {n} characters, found {len(line)}")
        for k, c in enumerate(line):
            if c not in _MATRIX_CHARS:
                raise FormatError(f"{path}:{i + 2}: illegal character {c!r} at column {k + 1}")
        entries[i] = [_MATRIX_CHARS[c] for c in line]
    trailing = [line for line in lines[m + 1 :] if line]
    if trailing:
        raise FormatError(f"{path}:{m + 2}: unexpected content after matrix")
    return ObservedMatrix(entries)


def write_matrix(matrix, path):
    """Write an ObservedMatrix or a dense {0,1,ERASED} array."""
    entries = matrix.entries if isinstance(matrix, ObservedMatrix) else np.asarray(matrix)
    if entries.ndim != 2:
        raise ValueError("matrix must be 2-d")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(f"{entries.shape[0]} {entries.shape[1]}\n")
        for row in entries:
            fh.write("".join(_CHAR_FOR[int(v)] for v in row))
            fh.write("\n")


def read_labels(path) -> Partition:
    """Read a labels file: a count line, then that many space-separated
    nonnegative integers; labels are canonicalized."""
    with open(path, encoding="ascii", newline="") as fh:
        lines = fh.read().split("\n")
    try:
        count = int(lines[0])
    except (ValueError, IndexError):
        raise FormatError(f"{path}:1: expected a label count") from None
    if len(lines) < 2:
        raise FormatError(f"{path}:2: missing label line")
    tokens = lines[1].split()
    if len(tokens) != count:
        raise FormatError(f"{path}:2: expected {count} labels, found {len(tokens)}")
    try:
        labels = [int(tok) for tok in tokens]
    except ValueError:
        raise FormatError(f"{path}:2: labels must be integers") from None
    if any(lbl < 0 for lbl in labels):
        raise FormatError(f"{path}:2: labels must be nonnegative")
    return validate_partition(np.asarray(labels, dtype=np.int64))


def write_labels(partition: Partition, path):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(f"{len(partition)}\n")
        fh.write(" ".join(str(int(lbl)) for lbl in partition.labels))
        fh.write("\n")


@dataclass(frozen=True)
class ExperimentRun:
    """A parsed experiment config plus its optional sweep and worker keys."""

    config: ExperimentConfig
    sweep_axis: str | None
    sweep_values: list[float] | None
    workers: int


def _parse_bool(text: str) -> bool:
    if text in ("true", "false"):
        return text == "true"
    raise ValueError("expected true or false")


def _parse_values(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


_CONFIG_KEYS = {
    "m": int,
    "n": int,
    "m0": int,
    "n0": int,
    "eps": float,
    "p": float,
    "trials": int,
    "seed": int,
    "mode": Mode,
    "tie": TiePolicy,
    "permute": _parse_bool,
    "aspect_beta": float,
    "sweep_axis": str,
    "sweep_values": _parse_values,
    "workers": int,
}
_REQUIRED_KEYS = ("m", "n", "m0", "n0", "eps", "p", "trials", "seed", "mode")


def read_config(path) -> ExperimentRun:
    """Parse a flat ``key = value`` config file ('#' starts a comment)."""
    raw: dict[str, str] = {}
    with open(path, encoding="ascii", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise FormatError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = text.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise FormatError(f"{path}:{lineno}: unknown key {key!r}")
            if key in raw:
                raise FormatError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise FormatError(f"{path}: missing required key {key!r}")
    parsed = {}
    for key, value in raw.items():
        try:
            parsed[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise FormatError(f"{path}: bad value for key {key!r}: {exc}") from None
    axis = parsed.get("sweep_axis")
    values = parsed.get("sweep_values")
    if axis is not None and axis not in SWEEP_AXES:
        raise FormatError(f"{path}: bad value for key 'sweep_axis': expected one of {SWEEP_AXES}")
    if (axis is None) != (values is None):
        raise FormatError(f"{path}: sweep_axis and sweep_values must be given together")
    try:
        law = GenerationLaw(
            parsed["m"], parsed["n"], parsed["m0"], parsed["n0"], parsed.get("permute", True)
        )
        ch = ChannelParams(parsed["eps"], parsed["p"])
        config = ExperimentConfig(
            law=law,
            ch=ch,
            tie=parsed.get("tie", TiePolicy.FAIR_COIN),
            mode=parsed["mode"],
            trials=parsed["trials"],
            master_seed=parsed["seed"],
            aspect_beta=parsed.get("aspect_beta"),
        )
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return ExperimentRun(config, axis, values, parsed.get("workers", 1))


def format_number(value) -> str:
    """Render a value for the results CSV (floats at 12 significant digits)."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def write_results_csv(rows: list[dict], path):
    """Write a result table; the header is the key order of the first row."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if not rows:
            return
        columns = list(rows[0].keys())
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(row[col]) for col in columns])


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_results_csv(path) -> list[dict]:
    """Read a result table back; numeric cells become ints or floats."""
    with open(path, encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        try:
            columns = next(reader)
        except StopIteration:
            return []
        return [dict(zip(columns, map(_parse_cell, row))) for row in reader]
