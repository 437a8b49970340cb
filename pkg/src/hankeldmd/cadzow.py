"""Cadzow denoising: alternate rank-r truncation and Hankel projection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .embedding import TrajectoryMatrix, project_hankel
from .errors import InvalidConfig, SvdFailure

__all__ = ["CadzowConfig", "truncate_rank", "cadzow_denoise", "rank_residual"]


@dataclass(frozen=True)
class CadzowConfig:
    """Iteration budget and target rank.

    ``tol`` enables an early exit once the distance to the rank-r set drops
    below ``tol * ||H||_F``; leave it ``None`` on the real-time path so the
    cost per window is fixed.
    """

    iterations: int = 3
    rank: int = 1
    tol: Optional[float] = None

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidConfig("Cadzow needs at least one iteration")
        if self.rank < 1:
            raise InvalidConfig("Cadzow rank must be >= 1")

    def validate_for(self, shape: tuple[int, int]) -> None:
        if self.rank > min(shape):
            raise InvalidConfig(f"rank {self.rank} exceeds min dimension of a {shape[0]}x{shape[1]} matrix")


def truncate_rank(M: ArrayLike, r: int) -> NDArray[np.float64]:
    """Best rank-``r`` approximation in Frobenius norm (truncated SVD)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    M = np.asarray(M, dtype=float)
    if r >= min(M.shape):
        return M.copy()
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    return (U[:, :r] * s[:r]) @ Vt[:r]


def rank_residual(M: ArrayLike, r: int) -> float:
    """Frobenius distance from ``M`` to the set of rank-``r`` matrices."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return float(np.sqrt(np.sum(s[r:] ** 2)))


def cadzow_denoise(H: TrajectoryMatrix, cfg: CadzowConfig) -> TrajectoryMatrix:
    if H.kind != "hankel":
        raise ValueError(f"expected a Hankel matrix, got {H.kind}")
    cfg.validate_for(H.shape)
    X = H
    stop = None if cfg.tol is None else cfg.tol * np.linalg.norm(H.data)
    for j in range(cfg.iterations):
        Y = truncate_rank(X.data, cfg.rank)
        if stop is not None and j > 0 and np.linalg.norm(Y - X.data) < stop:
            break
        X = project_hankel(Y, H.L, H.n_x)
    return X
