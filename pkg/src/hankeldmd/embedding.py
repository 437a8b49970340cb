"""Delay embeddings of a measurement window.

A window of ``N`` measurement vectors ``x_k`` (each of length ``n_x``) is
stacked into a block Hankel matrix (overlapping windows of length ``L``) or a
block Page matrix (non-overlapping windows). Blocks are whole measurement
vectors, so anti-diagonal averaging never mixes measurement components.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

from .errors import (
    BufferNotFull,
    DimensionMismatch,
    NotConsistent,
    NotDivisible,
    ShapeMismatch,
    WindowTooLong,
)

__all__ = [
    "MeasurementBuffer",
    "TrajectoryMatrix",
    "build_hankel",
    "build_page",
    "project_hankel",
    "extract_signal",
    "hankel_from_signal",
]

CONSISTENCY_RTOL = 1e-9


class MeasurementBuffer:
    """Fixed-capacity circular window of the latest ``capacity`` samples.

    Pushing into a full buffer evicts the oldest sample. ``window()`` returns
    the samples oldest-first as a fresh ``(len, dim)`` array.
    """

    def __init__(self, capacity: int, dim: int = 1, dt: float = 1.0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if not dt > 0:
            raise ValueError("dt must be > 0")
        self.capacity = int(capacity)
        self.dim = int(dim)
        self.dt = float(dt)
        self._data = np.zeros((self.capacity, self.dim))
        self._head = 0  # slot the next push writes to
        self._count = 0

    @classmethod
    def from_samples(cls, samples: ArrayLike, dt: float = 1.0) -> "MeasurementBuffer":
        """Buffer sized exactly to ``samples`` and filled with them."""
        arr = _as_samples(samples)
        buf = cls(arr.shape[0], arr.shape[1], dt)
        for row in arr:
            buf.push(row)
        return buf

    def push(self, sample: ArrayLike) -> None:
        x = np.asarray(sample, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(f"sample has dimension {x.shape[0]}, expected {self.dim}")
        self._data[self._head] = x
        self._head = (self._head + 1) % self.capacity
        self._count = min(self._count + 1, self.capacity)

    def window(self) -> NDArray[np.float64]:
        if self._count < self.capacity:
            return self._data[: self._count].copy()
        return np.roll(self._data, -self._head, axis=0)

    @property
    def is_full(self) -> bool:
        return self._count == self.capacity

    def clear(self) -> None:
        self._head = 0
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def __repr__(self) -> str:
        return f"MeasurementBuffer(capacity={self.capacity}, dim={self.dim}, len={self._count}, dt={self.dt})"


@dataclass(frozen=True)
class TrajectoryMatrix:
    """A block Hankel or block Page embedding with its shape metadata.

    ``data`` has ``L * n_x`` rows; block ``(l, j)`` is the ``n_x``-vector in
    rows ``l*n_x : (l+1)*n_x`` of column ``j``.
    """

    kind: Literal["hankel", "page"]
    L: int
    n_x: int
    data: NDArray[np.float64]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def blocks(self) -> NDArray[np.float64]:
        """View of ``data`` as an ``(L, n_x, cols)`` array."""
        return self.data.reshape(self.L, self.n_x, self.cols)


def _as_samples(samples: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeMismatch("samples must be a 1-D sequence or an (N, n_x) array")
    return arr


def _window_of(buf: MeasurementBuffer | ArrayLike) -> NDArray[np.float64]:
    if isinstance(buf, MeasurementBuffer):
        if not buf.is_full:
            raise BufferNotFull(f"buffer holds {len(buf)} of {buf.capacity} samples")
        return buf.window()
    return _as_samples(buf)


def hankel_from_signal(X: NDArray[np.float64], L: int) -> TrajectoryMatrix:
    """Block Hankel matrix of an ``(N, n_x)`` sample array."""
    N, n_x = X.shape
    cols = N - L + 1
    # windows[j, k, l] = X[j + l, k]
    windows = sliding_window_view(X, L, axis=0)
    data = np.ascontiguousarray(windows.transpose(2, 1, 0).reshape(L * n_x, cols))
    return TrajectoryMatrix("hankel", L, n_x, data)


def build_hankel(buf: MeasurementBuffer | ArrayLike, L: int) -> TrajectoryMatrix:
    """Embed a full window into a block Hankel matrix.

    Column ``j`` stacks ``x_j, ..., x_{j+L-1}`` oldest on top, giving
    ``L*n_x`` rows and ``N-L+1`` columns. Plain arrays are accepted as an
    already-full window.
    """
    X = _window_of(buf)
    N = X.shape[0]
    if L < 1:
        raise ValueError("L must be >= 1")
    if L > N:
        raise WindowTooLong(f"L={L} exceeds window length N={N}")
    return hankel_from_signal(X, int(L))


def build_page(buf: MeasurementBuffer | ArrayLike, L: int) -> TrajectoryMatrix:
    """Embed a full window into a block Page matrix of ``N/L`` disjoint segments."""
    X = _window_of(buf)
    N, n_x = X.shape
    if L < 1:
        raise ValueError("L must be >= 1")
    if L > N:
        raise WindowTooLong(f"L={L} exceeds window length N={N}")
    if N % L:
        raise NotDivisible(f"N={N} is not a multiple of L={L}")
    m = N // L
    # segments[j, l, k] = X[j*L + l, k]
    segments = X.reshape(m, L, n_x)
    data = np.ascontiguousarray(segments.transpose(1, 2, 0).reshape(L * n_x, m))
    return TrajectoryMatrix("page", int(L), n_x, data)


def _antidiagonal_stats(data: NDArray[np.float64], L: int, n_x: int):
    """Block anti-diagonal means, shape ``(L + cols - 1, n_x)``, plus the block view."""
    rows, cols = data.shape
    if rows != L * n_x:
        raise ShapeMismatch(f"matrix has {rows} rows, expected L*n_x={L * n_x}")
    if cols < 1:
        raise ShapeMismatch("matrix needs at least one column")
    blocks = data.reshape(L, n_x, cols)
    N = L + cols - 1
    sums = np.zeros((N, n_x))
    counts = np.zeros(N)
    for l in range(L):
        sums[l : l + cols] += blocks[l].T
        counts[l : l + cols] += 1.0
    return sums / counts[:, None], blocks


def project_hankel(M: ArrayLike, L: int, n_x: int = 1) -> TrajectoryMatrix:
    """Nearest block Hankel matrix in Frobenius norm.

    Every block anti-diagonal is replaced by its arithmetic mean.
    """
    data = np.asarray(M, dtype=float)
    if data.ndim != 2:
        raise ShapeMismatch("M must be 2-D")
    means, _ = _antidiagonal_stats(data, L, n_x)
    return hankel_from_signal(means, L)


def extract_signal(H: TrajectoryMatrix, rtol: float = CONSISTENCY_RTOL) -> NDArray[np.float64]:
    """Recover the ``(N, n_x)`` sample sequence embedded in a Hankel matrix.

    Raises:
        NotConsistent: some anti-diagonal deviates from its mean by more than
            ``rtol`` times the largest absolute entry.
    """
    if H.kind != "hankel":
        raise NotConsistent(f"expected a Hankel matrix, got {H.kind}")
    means, blocks = _antidiagonal_stats(H.data, H.L, H.n_x)
    cols = H.cols
    dev = 0.0
    for l in range(H.L):
        dev = max(dev, float(np.max(np.abs(blocks[l].T - means[l : l + cols]), initial=0.0)))
    scale = float(np.max(np.abs(H.data), initial=0.0))
    if dev > rtol * scale:
        raise NotConsistent(f"anti-diagonal deviation {dev:.3e} exceeds {rtol:.1e} * {scale:.3e}")
    # read entries off rather than returning the means: keeps the round trip bit-exact
    return np.concatenate([blocks[:, :, 0], blocks[-1, :, 1:].T], axis=0)
