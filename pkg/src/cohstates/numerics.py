"""Small numerical helpers: grids, golden-section search, log-log fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def geometric_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """`count` points geometrically spaced from `lo` to `hi` inclusive."""
    if lo <= 0 or hi <= lo:
        raise ValueError("need 0 < lo < hi")
    if count < 2:
        raise ValueError("need at least 2 grid points")
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))


def golden_section_max(f, a: float, b: float, iters: int = 40) -> tuple[float, float]:
    """Maximize a unimodal scalar function on [a, b].

    Returns (x_best, f(x_best)). The iteration count is capped; 40 steps
    shrink the bracket by ~1e-8 of its width.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


@dataclass(frozen=True)
class LineFit:
    """Least-squares line fit with conservative slope uncertainty.

    `slope_bound` bounds how much a structured residual pattern of the
    observed amplitude can tilt the fitted slope: a residual band of width h
    over an abscissa span L admits slope shifts up to ~3h/L, so we report
    4*(max residual - min residual)/L.  `rms` is the plain RMS residual.
    """

    slope: float
    intercept: float
    rms: float
    slope_bound: float
    resid_range: float


def fit_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 points to fit a line")
    span = float(x.max() - x.min())
    if span <= 0:
        raise ValueError("degenerate abscissa span")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    rng = float(resid.max() - resid.min())
    return LineFit(
        slope=float(slope),
        intercept=float(intercept),
        rms=rms,
        slope_bound=4.0 * rng / span,
        resid_range=rng,
    )


def tail_half(arr: np.ndarray) -> np.ndarray:
    """Indices of the upper half of a sorted 1-d array (at least 4 points)."""
    n = len(arr)
    k = max(4, n // 2)
    return np.arange(n - k, n)
