"""Regime classification, term dominance, correlation and windowed summaries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooFewAlignedPointsError, ZeroVarianceError
from .model import (
    REGIME_TOL,
    ModelParams,
    Regime,
    _linear_halfwidth,
    solution_coefficients,
)
from .series import TimeSeries

__all__ = [
    "CorrelationResult",
    "Dominance",
    "SummaryRow",
    "classify_regime",
    "correlate",
    "dominant_term",
    "yearly_summary",
]

# times are rounded to this grid before exact-key alignment
_ALIGN_QUANTUM = 1e-9


@dataclass(frozen=True)
class CorrelationResult:
    """Ordinary least squares of y on x over the aligned pairs."""

    slope: float
    intercept: float
    pearson: float
    n: int


@dataclass(frozen=True)
class SummaryRow:
    """Per-window mean, population stddev, and points beyond two sigma."""

    window_start: float
    mean: float
    stddev: float
    outliers: tuple[tuple[float, float], ...]


class Dominance(enum.Enum):
    """Which exponential term carries the solution at a given time."""

    GROWING_TERM = "growing_term"
    DECAYING_TERM = "decaying_term"
    BALANCED = "balanced"


def classify_regime(params: ModelParams, tol: float = REGIME_TOL) -> Regime:
    """Solution family from the sign of s = a^2 - b^2.

    |s| within tol*(1 + a^2 + b^2) of zero counts as linear; the relative
    scaling keeps the classification stable when (a, b) are rescaled.
    """
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"tol must be positive, got {tol!r}")
    s = params.a * params.a - params.b * params.b
    band = _linear_halfwidth(params, tol)
    if abs(s) <= band:
        return Regime.LINEAR
    return Regime.EXPONENTIAL if s > 0 else Regime.OSCILLATORY


def dominant_term(params: ModelParams, t: float) -> Dominance:
    """Compare |w1*e^{rt}| against |w2*e^{-rt}| at time t.

    Works in log space so the comparison survives times where either term
    overflows.  The terms are balanced when they agree to 1e-9 relative,
    which happens at the single crossover ln(|w2|/|w1|)/(2r) when both
    coefficients are nonzero.  Raises NotExponentialError outside the
    exponential regime.
    """
    coeffs = solution_coefficients(params)
    w1, w2, r = abs(coeffs.w1), abs(coeffs.w2), coeffs.r
    if w1 == 0.0 and w2 == 0.0:
        return Dominance.BALANCED
    if w1 == 0.0:
        return Dominance.DECAYING_TERM
    if w2 == 0.0:
        return Dominance.GROWING_TERM
    gap = (math.log(w1) + r * t) - (math.log(w2) - r * t)
    if abs(gap) <= 1e-9:
        return Dominance.BALANCED
    return Dominance.GROWING_TERM if gap > 0 else Dominance.DECAYING_TERM


def correlate(x: TimeSeries, y: TimeSeries) -> CorrelationResult:
    """Least-squares line and Pearson coefficient over time-aligned pairs.

    Pairs are matched on exact time keys after rounding both series' times
    to 1e-9; no interpolation is performed.  Raises ZeroVarianceError when
    the aligned x values are constant.  If the y values are constant the
    slope is 0 and pearson is reported as 0.0 (the coefficient is undefined
    there).
    """
    def keys(series: TimeSeries) -> dict[int, float]:
        return {
            int(round(t / _ALIGN_QUANTUM)): v
            for t, v in zip(series.times.tolist(), series.values.tolist())
        }

    xk = keys(x)
    yk = keys(y)
    shared = sorted(set(xk) & set(yk))
    if len(shared) < 2:
        raise TooFewAlignedPointsError(
            f"need at least 2 aligned time points, got {len(shared)}"
        )
    xv = np.array([xk[k] for k in shared])
    yv = np.array([yk[k] for k in shared])
    n = len(shared)
    xm, ym = xv.mean(), yv.mean()
    dx, dy = xv - xm, yv - ym
    var_x = float(dx @ dx)
    if var_x == 0.0:
        raise ZeroVarianceError("x is constant over the aligned pairs")
    cov = float(dx @ dy)
    var_y = float(dy @ dy)
    slope = cov / var_x
    intercept = float(ym - slope * xm)
    pearson = cov / math.sqrt(var_x * var_y) if var_y > 0.0 else 0.0
    return CorrelationResult(slope=slope, intercept=intercept, pearson=pearson, n=n)


def yearly_summary(series: TimeSeries, window: float) -> list[SummaryRow]:
    """Windowed means, stddevs and 2-sigma outliers.

    Consecutive windows of the given width start at the first observation
    time; each point belongs to exactly one window and empty windows are
    omitted.  A point (t, v) is flagged as an outlier of its window when
    |v - mean| > 2 * stddev (population stddev).
    """
    if not (math.isfinite(window) and window > 0):
        raise ValueError(f"window must be positive, got {window!r}")
    t0 = float(series.times[0])
    index = np.floor((series.times - t0) / window).astype(int)
    rows = []
    for k in sorted(set(index.tolist())):
        inside = index == k
        tw = series.times[inside]
        vw = series.values[inside]
        mean = float(vw.mean())
        stddev = float(vw.std())
        spread = np.abs(vw - mean)
        flagged = spread > 2.0 * stddev
        rows.append(
            SummaryRow(
                window_start=t0 + k * window,
                mean=mean,
                stddev=stddev,
                outliers=tuple(zip(tw[flagged].tolist(), vw[flagged].tolist())),
            )
        )
    return rows
