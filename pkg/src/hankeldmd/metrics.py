"""Denoising and forecast scoring."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike

from .errors import LengthMismatch

__all__ = [
    "DenoiseReport",
    "ViolationReport",
    "rms",
    "denoise_report",
    "violation_duration",
    "aggregate_violation",
    "ViolationAccumulator",
    "DenoiseAccumulator",
]


@dataclass(frozen=True)
class DenoiseReport:
    snr_in_db: float
    snr_out_db: float
    snr_gain_db: float
    noise_reduction_pct: float
    rmse: float
    zero_residual: bool = False  # denoised == clean exactly; SNR out is +inf

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ViolationReport:
    epsilon: float
    J_t: float  # seconds at or above epsilon
    horizon_seconds: float
    pct_violating: float
    scope: str = "window"  # "window" or "run" (summed over every forecast window)

    def to_dict(self) -> dict:
        return asdict(self)


def rms(x: ArrayLike) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean(x * x)))


def _db(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    if num == 0.0:
        return -math.inf
    return 10.0 * math.log10(num / den)


def _from_sums(signal_pow: float, in_err: float, out_err: float, n: int) -> DenoiseReport:
    snr_in = _db(signal_pow, in_err)
    snr_out = _db(signal_pow, out_err)
    if out_err == 0.0:
        gain = math.inf
    elif in_err == 0.0:
        gain = -math.inf
    else:
        gain = 10.0 * math.log10(in_err / out_err)
    reduction = 100.0 * (1.0 - math.sqrt(out_err / in_err)) if in_err > 0 else (100.0 if out_err == 0 else -math.inf)
    return DenoiseReport(snr_in, snr_out, gain, reduction, math.sqrt(out_err / n), zero_residual=out_err == 0.0)


def denoise_report(clean: ArrayLike, noisy: ArrayLike, denoised: ArrayLike) -> DenoiseReport:
    """SNR in/out (signal power over residual power, dB), RMS-ratio noise reduction and RMSE."""
    clean = np.asarray(clean, dtype=float)
    noisy = np.asarray(noisy, dtype=float)
    denoised = np.asarray(denoised, dtype=float)
    if not (clean.shape == noisy.shape == denoised.shape):
        raise LengthMismatch(f"shapes differ: {clean.shape}, {noisy.shape}, {denoised.shape}")
    if clean.size == 0:
        raise LengthMismatch("need at least one sample")
    return _from_sums(
        float(np.sum(clean**2)),
        float(np.sum((noisy - clean) ** 2)),
        float(np.sum((denoised - clean) ** 2)),
        clean.size,
    )


def _errors(pred: ArrayLike, truth: ArrayLike) -> np.ndarray:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.ndim == 1:
        pred = pred[:, None]
    if truth.ndim == 1:
        truth = truth[:, None]
    if pred.shape != truth.shape:
        raise LengthMismatch(f"prediction shape {pred.shape} != truth shape {truth.shape}")
    return np.linalg.norm(pred - truth, axis=1)


def violation_duration(pred: ArrayLike, truth: ArrayLike, dt: float, epsilon: float) -> ViolationReport:
    """Time the Euclidean forecast error spends at or above ``epsilon``."""
    if not dt > 0 or not epsilon > 0:
        raise ValueError("dt and epsilon must be > 0")
    e = _errors(pred, truth)
    J = dt * int(np.count_nonzero(e >= epsilon))
    horizon = dt * e.size
    return ViolationReport(epsilon, J, horizon, 100.0 * J / horizon if horizon else 0.0)


def aggregate_violation(pairs: Iterable[tuple[ArrayLike, ArrayLike]], dt: float, epsilon: float) -> ViolationReport:
    """Run-level violation duration summed over many forecast windows."""
    acc = ViolationAccumulator(dt, epsilon)
    for pred, truth in pairs:
        acc.add(pred, truth)
    return acc.report()


class ViolationAccumulator:
    def __init__(self, dt: float, epsilon: float):
        if not dt > 0 or not epsilon > 0:
            raise ValueError("dt and epsilon must be > 0")
        self.dt = dt
        self.epsilon = epsilon
        self.violations = 0
        self.steps = 0

    def add(self, pred: ArrayLike, truth: ArrayLike) -> None:
        e = _errors(pred, truth)
        self.violations += int(np.count_nonzero(e >= self.epsilon))
        self.steps += e.size

    def report(self) -> ViolationReport:
        J = self.dt * self.violations
        horizon = self.dt * self.steps
        return ViolationReport(self.epsilon, J, horizon, 100.0 * J / horizon if horizon else 0.0, scope="run")


class DenoiseAccumulator:
    """Streaming version of :func:`denoise_report`."""

    def __init__(self):
        self.signal_pow = 0.0
        self.in_err = 0.0
        self.out_err = 0.0
        self.n = 0

    def add(self, clean: ArrayLike, noisy: ArrayLike, denoised: ArrayLike) -> None:
        clean = np.asarray(clean, dtype=float)
        self.signal_pow += float(np.sum(clean**2))
        self.in_err += float(np.sum((np.asarray(noisy, dtype=float) - clean) ** 2))
        self.out_err += float(np.sum((np.asarray(denoised, dtype=float) - clean) ** 2))
        self.n += clean.size

    def report(self) -> DenoiseReport:
        if self.n == 0:
            raise LengthMismatch("no samples accumulated")
        return _from_sums(self.signal_pow, self.in_err, self.out_err, self.n)
