"""Sample-stream CSV files and JSON-lines step records.

CSV layout: a header row, then one row per sample with an integer index in
the first column followed by ``n_x`` measurement values. UTF-8, ``.`` as the
decimal separator. Floats are written with ``repr`` so they round-trip.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import MalformedRow

__all__ = ["write_samples", "iter_samples", "read_samples", "step_record", "iter_records", "dumps"]


def write_samples(path: str | Path, values, header: Sequence[str] | None = None, start: int = 0) -> None:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if header is None:
        header = ["index"] + (["value"] if arr.shape[1] == 1 else [f"x{k}" for k in range(arr.shape[1])])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, row in enumerate(arr):
            w.writerow([start + i, *(repr(float(v)) for v in row)])


def iter_samples(path: str | Path) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(index, values)`` rows; row numbers in errors count the header as row 1."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MalformedRow(path, 1, "missing header row")
        width = len(header)
        if width < 2:
            raise MalformedRow(path, 1, "header needs an index column and at least one value column")
        prev = None
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise MalformedRow(path, rowno, f"expected {width} fields, got {len(row)}")
            try:
                idx = int(row[0])
            except ValueError:
                raise MalformedRow(path, rowno, f"index {row[0]!r} is not an integer") from None
            try:
                vals = np.array([float(v) for v in row[1:]])
            except ValueError as exc:
                raise MalformedRow(path, rowno, str(exc)) from None
            if not np.all(np.isfinite(vals)):
                raise MalformedRow(path, rowno, "non-finite measurement")
            if prev is not None and idx <= prev:
                raise MalformedRow(path, rowno, f"index {idx} does not increase (previous {prev})")
            prev = idx
            yield idx, vals


def read_samples(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    rows = list(iter_samples(path))
    if not rows:
        return np.empty(0, dtype=int), np.empty((0, 0))
    return np.array([r[0] for r in rows]), np.vstack([r[1] for r in rows])


def _finite_or_none(v: float):
    v = float(v)
    return v if math.isfinite(v) else None


def step_record(step, index: int, spectra: bool = False) -> dict:
    """JSON-ready record of one pipeline step; ``t`` is the input file index."""
    rec = {
        "t": int(index),
        "measurement": [float(v) for v in step.measurement],
        "denoised_current": [_finite_or_none(v) for v in step.denoised_current],
        "forecasts": [[_finite_or_none(v) for v in row] for row in step.forecast.values],
        "r_hat": int(step.rank.r_hat),
        "sigma2_hat": float(step.rank.sigma2_hat),
        "spectral_radius": _finite_or_none(step.spectral_radius),
        "diverged": bool(step.forecast.diverged),
        "latency_s": float(step.latency),
    }
    if spectra:
        ev = step.model.eigenvalues if step.model is not None else None
        rec["eigenvalues"] = None if ev is None else [[float(z.real), float(z.imag)] for z in ev]
    return rec


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False, separators=(",", ":"))


def iter_records(path: str | Path) -> Iterator[dict]:
    """Step records of a JSON-lines file, skipping the trailing summary line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRow(path, lineno, f"invalid JSON: {exc.msg}") from None
            if "summary" in rec:
                continue
            yield rec
