"""Synthetic measurement streams.

* forward speed of a unicycle tracking a figure-eight,
* Gaussian or AR(1)-Laplace measurement noise with matched stationary variance,
* noise-free linear-system outputs used as exact oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, InvalidProfile

__all__ = [
    "UnicycleProfile",
    "NoiseModel",
    "unicycle_velocity",
    "sample_times",
    "add_noise",
    "noise",
    "lti_stream",
]


@dataclass(frozen=True)
class UnicycleProfile:
    amplitude: float = 3.0  # m
    period: float = 40.0  # s
    dt: float = 0.02  # s
    duration: float = 160.0  # s

    def validate(self) -> None:
        if not self.amplitude > 0:
            raise InvalidProfile(f"amplitude must be > 0, got {self.amplitude}")
        if not self.period > 0:
            raise InvalidProfile(f"period must be > 0, got {self.period}")
        if not 0 < self.dt < self.period:
            raise InvalidProfile(f"dt must lie in (0, period), got {self.dt}")
        if not self.duration > 0:
            raise InvalidProfile(f"duration must be > 0, got {self.duration}")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass(frozen=True)
class NoiseModel:
    """Additive measurement noise.

    ``sigma`` is the stationary standard deviation for both kinds. For the
    AR(1)-Laplace kind the innovation scale is ``sqrt((1 - rho^2) sigma^2 / 2)``
    so the two kinds have equal variance.
    """

    kind: Literal["gaussian", "ar1laplace"] = "gaussian"
    sigma: float = 0.25
    rho: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "ar1laplace"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.kind == "ar1laplace" and not abs(self.rho) < 1:
            raise ValueError("AR(1) coefficient must satisfy |rho| < 1")

    @property
    def laplace_scale(self) -> float:
        return math.sqrt((1.0 - self.rho**2) * self.sigma**2 / 2.0)


def sample_times(profile: UnicycleProfile) -> NDArray[np.float64]:
    profile.validate()
    return np.arange(profile.n_samples) * profile.dt


def unicycle_velocity(profile: UnicycleProfile, t: ArrayLike | None = None) -> NDArray[np.float64]:
    """Forward speed along ``x = a sin(wt)``, ``y = (a/2) sin(2wt)``, ``w = 2 pi / T``.

    Evaluated on the profile's sample grid unless explicit times ``t`` are given.
    """
    profile.validate()
    t = sample_times(profile) if t is None else np.asarray(t, dtype=float)
    w = 2.0 * math.pi / profile.period
    a = profile.amplitude
    xdot = a * w * np.cos(w * t)
    ydot = a * w * np.cos(2.0 * w * t)
    return np.hypot(xdot, ydot)


def noise(n: int, model: NoiseModel) -> NDArray[np.float64]:
    rng = np.random.default_rng(model.seed)
    if model.kind == "gaussian":
        return rng.normal(0.0, model.sigma, size=n)
    b = model.laplace_scale
    w = rng.laplace(0.0, b, size=n)
    eta = np.empty(n)
    if n == 0:
        return eta
    # start at the stationary variance so short runs carry no burn-in transient
    eta[0] = rng.laplace(0.0, model.sigma / math.sqrt(2.0))
    for k in range(1, n):
        eta[k] = model.rho * eta[k - 1] + w[k]
    return eta


def add_noise(clean: ArrayLike, model: NoiseModel) -> NDArray[np.float64]:
    clean = np.asarray(clean, dtype=float)
    return clean + noise(clean.size, model).reshape(clean.shape)


def lti_stream(A: ArrayLike, C: ArrayLike, z0: ArrayLike, steps: int) -> NDArray[np.float64]:
    """Outputs ``x_k = C A^k z0`` for ``k < steps`` as a ``(steps, n_x)`` array.

    The recursion runs in extended precision (where the platform has it) and is
    rounded once at the end, so non-normal ``A`` does not leave round-off above
    the usual numerical-rank tolerance of the resulting trajectory matrices.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    z = np.asarray(z0, dtype=float).reshape(-1)
    n_z = z.shape[0]
    if A.shape != (n_z, n_z):
        raise DimensionMismatch(f"A has shape {A.shape}, state dimension is {n_z}")
    if C.shape[1] != n_z:
        raise DimensionMismatch(f"C has {C.shape[1]} columns, state dimension is {n_z}")
    A_ext, C_ext, z = A.astype(np.longdouble), C.astype(np.longdouble), z.astype(np.longdouble)
    out = np.empty((steps, C.shape[0]), dtype=np.longdouble)
    for k in range(steps):
        out[k] = C_ext @ z
        z = A_ext @ z
    return out.astype(np.float64)
