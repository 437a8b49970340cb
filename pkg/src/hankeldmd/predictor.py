"""Local linear predictor in delay coordinates (Hankel-DMD).

The one-step operator is the minimum-norm least-squares map between the
past and future column sets of a denoised Hankel matrix. Forecasts come from
iterating it on the newest lifted state and reading off the last block.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .embedding import TrajectoryMatrix
from .errors import DecompositionFailure, TooFewColumns

__all__ = [
    "PredictorModel",
    "Forecast",
    "split_shifted",
    "fit",
    "fit_operator",
    "rollout",
    "spectral_radius",
    "selector",
]

_EPS = np.finfo(float).eps


def selector(L: int, n_x: int) -> NDArray[np.float64]:
    """``[0 | I]``: picks the newest measurement block out of a lifted state."""
    D = np.zeros((n_x, L * n_x))
    D[:, (L - 1) * n_x :] = np.eye(n_x)
    return D


@dataclass(frozen=True)
class PredictorModel:
    A_hat: NDArray[np.float64]
    psi_star: NDArray[np.float64]
    L: int
    n_x: int
    eigenvalues: Optional[NDArray[np.complex128]]
    dt: float = 1.0

    @property
    def D(self) -> NDArray[np.float64]:
        return selector(self.L, self.n_x)

    def observe(self, psi: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(psi)[(self.L - 1) * self.n_x :]


@dataclass(frozen=True)
class Forecast:
    values: NDArray[np.float64]  # (horizon, n_x)
    horizon: int
    nu_hat_scale: Optional[float] = None
    diverged: bool = False


def split_shifted(H_hat: TrajectoryMatrix) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """All-but-last and all-but-first columns: the one-step shifted pair."""
    if H_hat.cols < 2:
        raise TooFewColumns(f"need >= 2 columns to form a shifted pair, got {H_hat.cols}")
    return H_hat.data[:, :-1], H_hat.data[:, 1:]


def fit_operator(past: NDArray[np.float64], future: NDArray[np.float64]) -> NDArray[np.float64]:
    """Minimum-norm solution of ``min ||future - A past||_F``.

    Singular values of ``past`` below ``max(shape) * eps * s_max`` are dropped.
    """
    try:
        U, s, Vt = np.linalg.svd(past, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((future.shape[0], past.shape[0]))
    keep = s > max(past.shape) * _EPS * s[0]
    U, s, Vt = U[:, keep], s[keep], Vt[keep]
    return ((future @ Vt.T) / s) @ U.T


def fit(H_hat: TrajectoryMatrix, dt: float = 1.0) -> PredictorModel:
    past, future = split_shifted(H_hat)
    A_hat = fit_operator(past, future)
    try:
        eigenvalues = np.linalg.eigvals(A_hat)
        if not np.all(np.isfinite(eigenvalues)):
            eigenvalues = None
    except np.linalg.LinAlgError:
        # spectra are diagnostics only; the model still forecasts
        eigenvalues = None
    return PredictorModel(
        A_hat=A_hat,
        psi_star=future[:, -1].copy(),
        L=H_hat.L,
        n_x=H_hat.n_x,
        eigenvalues=eigenvalues,
        dt=dt,
    )


def rollout(model: PredictorModel, horizon: int, nu_hat_scale: Optional[float] = None) -> Forecast:
    """Iterate the lifted dynamics ``horizon`` steps from ``psi_star``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    start = (model.L - 1) * model.n_x
    out = np.empty((horizon, model.n_x))
    psi = model.psi_star
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(horizon):
            psi = model.A_hat @ psi
            out[j] = psi[start:]
    return Forecast(out, horizon, nu_hat_scale, diverged=not bool(np.all(np.isfinite(out))))


def spectral_radius(model: PredictorModel) -> float:
    """Largest eigenvalue modulus; NaN when the spectrum is unavailable."""
    if model.eigenvalues is None:
        return float("nan")
    if model.eigenvalues.size == 0:
        return 0.0
    return float(np.max(np.abs(model.eigenvalues)))
