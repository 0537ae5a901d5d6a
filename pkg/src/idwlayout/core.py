"""Inverse-distance-weighting math: distances, weights, and the sequential
reference predictor every parallel strategy is checked against.

The interpolated value at a query point is the weight-normalized sum of the
sampled values, with weight 1/d^p for distance d to each data point. Distance
is planar over (x, y); z is the sampled value. A query whose squared distance
to some data point is <= zero_eps takes that point's z exactly (lowest index
wins) -- the limiting value of the formula.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels


class PointRecord(NamedTuple):
    """One sample: planar coordinates and the sampled value at them."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class Params:
    """Interpolation parameters.

    p: power exponent (> 0, default 2; p = 2 takes the reciprocal fast path).
    zero_eps: squared-distance threshold for the coincidence rule
        (>= 0, default 0.0 = exact-zero test).
    """

    p: float = 2.0
    zero_eps: float = 0.0

    def __post_init__(self) -> None:
        if not (self.p > 0):
            raise ValueError("power p must be > 0")
        if not (self.zero_eps >= 0):
            raise ValueError("zero_eps must be >= 0")


class Precision(enum.Enum):
    """Floating-point width used throughout one run (no mixed accumulation)."""

    single = "single"
    double = "double"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32 if self is Precision.single else np.float64)

    @property
    def itemsize(self) -> int:
        return 4 if self is Precision.single else 8

    @classmethod
    def parse(cls, name: str) -> "Precision":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown precision {name!r}") from None


def squared_distance(q: tuple[float, float], d: tuple[float, float]) -> float:
    """Squared planar distance between a query point and a data point."""
    dx = q[0] - d[0]
    dy = q[1] - d[1]
    return dx * dx + dy * dy


def weight(d2: float, p: float = 2.0) -> float:
    """Inverse-distance weight from a squared distance.

    p = 2 returns 1/d2 directly (no square root); other p uses d2**(-p/2).
    d2 must be positive -- coincident points are handled by the caller's
    coincidence rule, not here.
    """
    if not d2 > 0:
        raise ValueError("weight requires d2 > 0 (coincidence is handled by the caller)")
    if p == 2.0:
        return 1.0 / d2
    return d2 ** (-p / 2.0)


def _as_query_array(queries) -> np.ndarray:
    qs = np.asarray(queries, dtype=np.float64)
    if qs.size == 0:
        return qs.reshape(0, 2)
    if qs.ndim == 1 and qs.shape[0] == 2:
        qs = qs.reshape(1, 2)
    if qs.ndim != 2 or qs.shape[1] != 2:
        raise ValueError("queries must be a sequence of (x, y) pairs")
    return qs


def _as_data_arrays(data) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no data points")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("data must be a sequence of (x, y, z) records")
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]), np.ascontiguousarray(arr[:, 2])


def ensure_finite(*arrays: np.ndarray) -> None:
    for a in arrays:
        if a.size and not np.isfinite(a).all():
            raise ValueError("invalid coordinate")


def idw_predict_seq(
    data: Sequence[PointRecord] | Iterable[tuple[float, float, float]] | np.ndarray,
    queries,
    params: Params = Params(),
    precision: Precision = Precision.double,
) -> np.ndarray:
    """Sequential reference predictor.

    One deterministic left-to-right pass over all n data points per query, at
    the stated precision. This is the determinism oracle the parallel
    strategies are compared against; it is single-threaded by contract.
    Returns an array of the precision's dtype, one value per query.
    """
    xs64, ys64, zs64 = _as_data_arrays(data)
    qs64 = _as_query_array(queries)
    ensure_finite(xs64, ys64, zs64, qs64)

    dt = precision.dtype
    xs = xs64.astype(dt, copy=False)
    ys = ys64.astype(dt, copy=False)
    zs = zs64.astype(dt, copy=False)
    qx = np.ascontiguousarray(qs64[:, 0].astype(dt, copy=False))
    qy = np.ascontiguousarray(qs64[:, 1].astype(dt, copy=False))

    out = np.empty(qx.shape[0], dtype=dt)
    if out.size == 0:
        return out
    fast, wexp, zero_eps, zero, one = kernels.scalar_args(params.p, params.zero_eps, dt)
    kernels.predict_block(qx, qy, xs, ys, zs, fast, wexp, zero_eps, zero, one, out, 0, out.shape[0])
    return out


def prediction_ulps(a: float, b: float) -> float:
    """Distance between two doubles in units of the larger value's ulp."""
    if a == b:
        return 0.0
    return abs(a - b) / math.ulp(max(abs(a), abs(b)))
