"""Singular value hard thresholding on the Page matrix.

The threshold uses the data-driven form ``tau = lambda(beta) / sqrt(mu_beta) *
median singular value``, where ``lambda(beta)`` is the AMSE-optimal constant
for known noise and ``mu_beta`` is the median of the Marchenko-Pastur law
with aspect ratio ``beta``. The same median gives a noise variance estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .embedding import TrajectoryMatrix, build_hankel, build_page
from .errors import AspectRatioInvalid, ConvergenceFailure, KrylovDeficient, OutOfRange, SvdFailure
from .simgen import lti_stream

__all__ = [
    "RankEstimate",
    "lambda_star",
    "mp_density",
    "mp_support",
    "mp_cdf",
    "mp_median",
    "lower_median",
    "numerical_rank",
    "svht_rank",
    "rank_equivalence_check",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RankEstimate:
    singular_values: NDArray[np.float64]
    beta: float
    lambda_star: float
    mp_median: float
    tau_star: float
    r_hat: int
    sigma2_hat: float
    m: int

    @property
    def nu_hat_scale(self) -> float:
        """Scale of the isotropic delay-state noise covariance ``sigma2_hat * I``."""
        return self.sigma2_hat

    def nu_hat(self) -> NDArray[np.float64]:
        return self.sigma2_hat * np.eye(len(self.singular_values))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (0.0 < beta <= 1.0):
        raise OutOfRange(f"beta must lie in (0, 1], got {beta}")
    return beta


def lambda_star(beta: float) -> float:
    """Optimal hard threshold coefficient for known unit noise level."""
    beta = _check_beta(beta)
    return math.sqrt(2.0 * (beta + 1.0) + 8.0 * beta / ((beta + 1.0) + math.sqrt(beta * beta + 14.0 * beta + 1.0)))


def mp_support(beta: float) -> tuple[float, float]:
    beta = _check_beta(beta)
    s = math.sqrt(beta)
    return (1.0 - s) ** 2, (1.0 + s) ** 2


def mp_density(x: ArrayLike, beta: float) -> NDArray[np.float64]:
    """Marchenko-Pastur density with unit noise variance, zero off its support."""
    lo, hi = mp_support(beta)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt((hi - xi) * (xi - lo)) / (2.0 * math.pi * beta * xi)
    return out


# With x = lo + w sin^2(t/2) the density times dx becomes
#   (w/2)^2 sin^2 t / (2 pi beta x(t)) dt,
# smooth on [0, pi] for every beta in (0, 1], including the beta = 1 pole at x = 0.
# The half-angle form avoids cancellation in 1 - cos t near t = 0.
def _angle_integrand(t: float, beta: float, lo: float, w: float) -> float:
    h = math.sin(0.5 * t)
    x = lo + w * h * h
    if x <= 0.0:
        # beta = 1, t = 0: sin^2 t / (w sin^2(t/2)) -> 4 / w
        return (0.5 * w) ** 2 * 4.0 / (2.0 * math.pi * beta * w)
    s = math.sin(t)
    return (0.5 * w) ** 2 * s * s / (2.0 * math.pi * beta * x)


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 50) -> float:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0:
            raise ConvergenceFailure("adaptive Simpson hit its recursion limit")
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def _angle_of(x: float, lo: float, w: float) -> float:
    return 2.0 * math.asin(math.sqrt(min(1.0, max(0.0, (x - lo) / w))))


def mp_cdf(x: float, beta: float, tol: float = 1e-13) -> float:
    """Cumulative Marchenko-Pastur distribution at ``x``."""
    lo, hi = mp_support(beta)
    if x <= lo:
        return 0.0
    if x >= hi:
        return 1.0
    w = hi - lo
    return _adaptive_simpson(lambda t: _angle_integrand(t, beta, lo, w), 0.0, _angle_of(x, lo, w), tol)


@lru_cache(maxsize=256)
def _mp_median_cached(beta: float, xtol: float) -> float:
    lo, hi = mp_support(beta)
    a, b = lo, hi
    for _ in range(200):
        if b - a <= xtol:
            break
        mid = 0.5 * (a + b)
        if mp_cdf(mid, beta) < 0.5:
            a = mid
        else:
            b = mid
    else:
        raise ConvergenceFailure(f"median bisection did not converge for beta={beta}")
    return 0.5 * (a + b)


def mp_median(beta: float, xtol: float = 1e-10) -> float:
    """Median of the Marchenko-Pastur law with aspect ratio ``beta``.

    Memoized per ``beta``; ``functools.lru_cache`` keeps the cache consistent
    across threads.
    """
    return _mp_median_cached(_check_beta(beta), float(xtol))


def lower_median(values: ArrayLike) -> float:
    """Median that picks the smaller middle element for even lengths."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise ValueError("empty sequence has no median")
    return float(v[(v.size - 1) // 2])


def numerical_rank(s: NDArray[np.float64], shape: tuple[int, int]) -> int:
    """Count of singular values above ``max(shape) * eps * s_max``."""
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > max(shape) * _EPS * s[0]))


def svht_rank(P: TrajectoryMatrix | ArrayLike) -> RankEstimate:
    """Estimate the effective rank and noise variance of a Page matrix.

    ``r_hat`` counts singular values at or above the data-driven threshold,
    ignoring values at round-off level, and is clamped to at least 1.
    """
    data = P.data if isinstance(P, TrajectoryMatrix) else np.asarray(P, dtype=float)
    rows, cols = data.shape
    if rows > cols:
        raise AspectRatioInvalid(f"Page matrix is {rows}x{cols}; need rows <= cols")
    try:
        s = np.linalg.svd(data, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    beta = rows / cols
    lam = lambda_star(beta)
    mu = mp_median(beta)
    s_med = lower_median(s)
    tau = lam / math.sqrt(mu) * s_med
    r_hat = int(np.count_nonzero(s >= tau))
    r_hat = min(r_hat, numerical_rank(s, data.shape))
    r_hat = max(r_hat, 1)
    return RankEstimate(
        singular_values=s,
        beta=beta,
        lambda_star=lam,
        mp_median=mu,
        tau_star=tau,
        r_hat=r_hat,
        sigma2_hat=s_med * s_med / (mu * cols),
        m=cols,
    )


def rank_equivalence_check(A: ArrayLike, C: ArrayLike, z0: ArrayLike, L: int, d: int) -> bool:
    """Whether the Page and Hankel embeddings of a noise-free LTI output share rank.

    Simulates ``x_k = C A^k z0`` for ``k < d*L`` and compares numerical ranks.

    Raises:
        KrylovDeficient: ``z0, B z0, ..., B^(d-1) z0`` with ``B = A^L`` does
            not span the state space, so the equivalence is not guaranteed.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    z = np.asarray(z0, dtype=float).reshape(-1)
    n_z = A.shape[0]
    if A.shape != (n_z, n_z) or C.shape[1] != n_z or z.shape[0] != n_z:
        raise ValueError("inconsistent dimensions for A, C, z0")
    if not (d >= L >= n_z):
        raise OutOfRange(f"need d >= L >= n_z, got d={d}, L={L}, n_z={n_z}")

    B = np.linalg.matrix_power(A, L)
    F = np.empty((n_z, d))
    v = z.copy()
    for j in range(d):
        F[:, j] = v
        v = B @ v
    sF = np.linalg.svd(F, compute_uv=False)
    if numerical_rank(sF, F.shape) < n_z:
        raise KrylovDeficient("Krylov span of z0 under A^L is not the full state space")

    X = lti_stream(A, C, z, d * L)
    P = build_page(X, L).data
    H = build_hankel(X, L).data
    rP = numerical_rank(np.linalg.svd(P, compute_uv=False), P.shape)
    rH = numerical_rank(np.linalg.svd(H, compute_uv=False), H.shape)
    return rP == rH
