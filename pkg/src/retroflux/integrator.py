"""Numerical solution of the forced time-reversed influence equation.

The extension p'(t) = a*p(t) + b*p(-t) + eta(t) + theta(t) has no closed form,
and the mirrored argument means the equation is not an initial-value problem
as written.  Introducing the mirror state q(t) = p(-t) turns it into one:

    p'(t) =  a*p(t) + b*q(t) + g(t)
    q'(t) = -(a*q(t) + b*p(t) + g(-t))        p(0) = q(0) = c

with g collecting all forcing.  The coupled system is integrated forward on
[0, T] with classical fixed-step RK4, and p on [-T, 0) is reconstructed from
q, so the returned trajectory is self-consistent under time reflection by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStepError, OutOfRangeError, SolutionOverflowError
from .model import ModelParams
from .series import TimeSeries

__all__ = [
    "ForcingSpec",
    "GoodwillSpec",
    "Trajectory",
    "eval_forcing",
    "goodwill_theta",
    "integrate",
]

_OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class GoodwillSpec:
    """Publisher-goodwill forcing theta(t) = exp(-kappa*t) + alpha.

    kappa > 0 is the decay rate of the initial goodwill boost and alpha >= 0
    the floor it settles onto (zero means the goodwill fades out entirely).
    """

    kappa: float
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be a finite positive rate, got {self.kappa!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be a finite nonnegative floor, got {self.alpha!r}")


@dataclass(frozen=True)
class ForcingSpec:
    """Additive forcing: optional goodwill theta plus a control term eta.

    eta may be absent, a constant, or a tabulated TimeSeries evaluated by
    linear interpolation.  A tabulated eta must explicitly cover every time it
    is queried at, including negative times reached through the mirror state;
    it is never reflected or extrapolated silently.
    """

    theta: GoodwillSpec | None = None
    eta: float | TimeSeries | None = None

    def __post_init__(self) -> None:
        if self.theta is not None and not isinstance(self.theta, GoodwillSpec):
            raise TypeError("theta must be a GoodwillSpec or None")
        if self.eta is None or isinstance(self.eta, TimeSeries):
            return
        eta = float(self.eta)
        if not math.isfinite(eta):
            raise ValueError(f"constant eta must be finite, got {self.eta!r}")
        object.__setattr__(self, "eta", eta)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Densely sampled solution: value k sits at time t0 + k*h exactly."""

    t0: float
    h: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"step h must be positive, got {self.h!r}")
        if not math.isfinite(self.t0):
            raise ValueError(f"left endpoint t0 must be finite, got {self.t0!r}")
        v = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if v.size == 0:
            raise ValueError("trajectory must hold at least one sample")
        if not np.all(np.isfinite(v)):
            raise ValueError("trajectory values must all be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.size)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.h == other.h
            and np.array_equal(self.values, other.values)
        )


def goodwill_theta(spec: GoodwillSpec, t):
    """Evaluate theta(t) = exp(-kappa*t) + alpha at scalar or array t."""
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("time values must be finite")
    with np.errstate(over="ignore"):
        out = np.exp(-spec.kappa * arr) + spec.alpha
    if not np.all(np.isfinite(out)):
        raise SolutionOverflowError(
            "goodwill term overflows at strongly negative times"
        )
    return float(out) if arr.ndim == 0 else out


def eval_forcing(forcing: ForcingSpec | None, t):
    """Total forcing theta(t) + eta(t); absent components contribute zero.

    Raises OutOfRangeError when a tabulated eta does not cover t.
    """
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("time values must be finite")
    out = np.zeros_like(arr, dtype=float)
    if forcing is not None:
        if forcing.theta is not None:
            out = out + goodwill_theta(forcing.theta, arr)
        if isinstance(forcing.eta, TimeSeries):
            lo, hi = forcing.eta.times[0], forcing.eta.times[-1]
            if np.any(arr < lo) or np.any(arr > hi):
                raise OutOfRangeError(
                    f"tabulated eta covers [{lo:.6g}, {hi:.6g}] but was "
                    f"queried outside it"
                )
            out = out + np.interp(arr, forcing.eta.times, forcing.eta.values)
        elif forcing.eta is not None:
            out = out + forcing.eta
    return float(out) if arr.ndim == 0 else out


def _check_eta_coverage(forcing: ForcingSpec | None, T: float) -> None:
    if forcing is None or not isinstance(forcing.eta, TimeSeries):
        return
    lo, hi = forcing.eta.times[0], forcing.eta.times[-1]
    if lo > -T or hi < T:
        raise OutOfRangeError(
            f"tabulated eta covers [{lo:.6g}, {hi:.6g}] but integration "
            f"needs [-{T:.6g}, {T:.6g}] (mirror state evaluates eta at -t)"
        )


def integrate(
    params: ModelParams,
    forcing: ForcingSpec | None,
    T: float,
    h: float,
) -> Trajectory:
    """Solve the (optionally forced) influence equation on [-T, T].

    The step is adjusted to the nearest exact divisor of T so the grid lands
    on both endpoints; the returned Trajectory reports the adjusted step.
    For zero forcing the result matches the closed form to RK4 accuracy.
    """
    if not (math.isfinite(T) and T > 0):
        raise InvalidStepError(f"horizon T must be positive, got {T!r}")
    if not (math.isfinite(h) and 0 < h <= T):
        raise InvalidStepError(f"step h must satisfy 0 < h <= T, got {h!r}")
    _check_eta_coverage(forcing, T)

    n = max(1, round(T / h))
    h = T / n
    # linspace pins both endpoints exactly, so tabulated forcing declared on
    # [-T, T] is never queried an ulp outside its own range
    grid = np.linspace(0.0, T, n + 1)

    # Forcing sampled once on the stage grid; the RK4 loop then runs on
    # plain floats.  gf/gmf sit on the full grid, gh/gmh on the midpoints.
    if forcing is None or (forcing.theta is None and forcing.eta is None):
        gf = gmf = [0.0] * (n + 1)
        gh = gmh = [0.0] * n
    else:
        mid = 0.5 * (grid[:-1] + grid[1:])
        gf = eval_forcing(forcing, grid).tolist()
        gh = eval_forcing(forcing, mid).tolist()
        gmf = eval_forcing(forcing, -grid).tolist()
        gmh = eval_forcing(forcing, -mid).tolist()

    a, b, c = params.a, params.b, params.c
    p = q = c
    P = [p]
    Q = [q]
    half = 0.5 * h
    sixth = h / 6.0
    for k in range(n):
        k1p = a * p + b * q + gf[k]
        k1q = -(a * q + b * p + gmf[k])
        p2 = p + half * k1p
        q2 = q + half * k1q
        k2p = a * p2 + b * q2 + gh[k]
        k2q = -(a * q2 + b * p2 + gmh[k])
        p3 = p + half * k2p
        q3 = q + half * k2q
        k3p = a * p3 + b * q3 + gh[k]
        k3q = -(a * q3 + b * p3 + gmh[k])
        p4 = p + h * k3p
        q4 = q + h * k3q
        k4p = a * p4 + b * q4 + gf[k + 1]
        k4q = -(a * q4 + b * p4 + gmf[k + 1])
        p = p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        q = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)
        if not (abs(p) < _OVERFLOW_LIMIT and abs(q) < _OVERFLOW_LIMIT):
            raise SolutionOverflowError(
                f"solution magnitude exceeded {_OVERFLOW_LIMIT:.0e} at "
                f"t={h * (k + 1):.6g}; shrink the horizon"
            )
        P.append(p)
        Q.append(q)

    # p(-t) = q(t): prepend the reflected mirror state to cover [-T, 0).
    values = np.concatenate([np.asarray(Q[1:], dtype=float)[::-1], np.asarray(P)])
    return Trajectory(t0=-T, h=h, values=values)
