"""Sliding-window denoise-and-forecast loop.

Each new sample advances the buffer by one. Once the buffer is full, every
step runs: Page matrix -> SVHT rank and noise variance -> Hankel matrix ->
Cadzow at the estimated rank -> least-squares one-step operator -> rollout.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .cadzow import CadzowConfig, cadzow_denoise
from .embedding import MeasurementBuffer, build_hankel, build_page
from .errors import DimensionMismatch, HankelDMDError, InvalidConfig, PipelineStepError
from .predictor import Forecast, PredictorModel, fit, rollout, spectral_radius
from .spectrum import RankEstimate, mp_median, svht_rank

__all__ = ["PipelineConfig", "StepOutput", "Pipeline", "run_stream"]


@dataclass(frozen=True)
class PipelineConfig:
    """Window geometry and horizons.

    ``N`` must be a multiple of ``L`` and the Page matrix must be no taller
    than it is wide: ``N / L >= L * n_x``.
    """

    L: int = 10
    N: int = 250
    n_x: int = 1
    horizon: int = 31
    cadzow_iters: int = 3
    dt: float = 0.02

    def __post_init__(self):
        for name in ("L", "N", "n_x", "horizon", "cadzow_iters"):
            if int(getattr(self, name)) < 1:
                raise InvalidConfig(f"{name} must be a positive count, got {getattr(self, name)}")
        if not self.dt > 0:
            raise InvalidConfig(f"dt must be > 0, got {self.dt}")
        if self.N % self.L:
            raise InvalidConfig(f"N={self.N} must be a multiple of L={self.L}")
        if self.m < self.L * self.n_x:
            raise InvalidConfig(f"need N/L >= L*n_x, got N/L={self.m} < {self.L * self.n_x}")

    @property
    def m(self) -> int:
        """Page column count."""
        return self.N // self.L


@dataclass
class StepOutput:
    t: int  # index of the newest sample in the window
    measurement: NDArray[np.float64]
    denoised_current: NDArray[np.float64]
    forecast: Forecast
    rank: RankEstimate
    spectral_radius: float
    latency: float  # seconds
    model: Optional[PredictorModel] = field(default=None, repr=False)

    @property
    def r_hat(self) -> int:
        return self.rank.r_hat

    @property
    def sigma2_hat(self) -> float:
        return self.rank.sigma2_hat


class Pipeline:
    """Stateful streaming driver; one instance per stream, single writer."""

    def __init__(self, config: PipelineConfig | None = None, keep_model: bool = True):
        self.config = config or PipelineConfig()
        self.keep_model = keep_model
        self.buffer = MeasurementBuffer(self.config.N, self.config.n_x, self.config.dt)
        self._t = -1
        # warm the MP median cache so the first step pays no quadrature cost
        mp_median(self.config.L * self.config.n_x / self.config.m)

    @property
    def t(self) -> int:
        return self._t

    def reset(self) -> None:
        self.buffer.clear()
        self._t = -1

    def push(self, sample: ArrayLike) -> Optional[StepOutput]:
        x = np.asarray(sample, dtype=float).reshape(-1)
        if x.shape[0] != self.config.n_x:
            raise DimensionMismatch(f"sample has dimension {x.shape[0]}, expected {self.config.n_x}")
        self.buffer.push(x)
        self._t += 1
        if not self.buffer.is_full:
            return None
        try:
            return self._step(x)
        except (HankelDMDError, np.linalg.LinAlgError, FloatingPointError) as exc:
            raise PipelineStepError(self._t, exc) from exc

    def _step(self, x: NDArray[np.float64]) -> StepOutput:
        cfg = self.config
        start = time.perf_counter()
        window = self.buffer.window()
        rank = svht_rank(build_page(window, cfg.L))
        H = build_hankel(window, cfg.L)
        H_hat = cadzow_denoise(H, CadzowConfig(cfg.cadzow_iters, rank.r_hat))
        model = fit(H_hat, cfg.dt)
        forecast = rollout(model, cfg.horizon, rank.sigma2_hat)
        rho = spectral_radius(model)
        denoised = H_hat.data[-cfg.n_x :, -1].copy()
        latency = time.perf_counter() - start
        return StepOutput(
            t=self._t,
            measurement=x.copy(),
            denoised_current=denoised,
            forecast=forecast,
            rank=rank,
            spectral_radius=rho,
            latency=latency,
            model=model if self.keep_model else None,
        )


def run_stream(samples: Iterable[ArrayLike], config: PipelineConfig | None = None) -> list[StepOutput]:
    """Push every sample through a fresh pipeline and collect the outputs."""
    pipe = Pipeline(config)
    out = []
    for s in samples:
        step = pipe.push(s)
        if step is not None:
            out.append(step)
    return out
