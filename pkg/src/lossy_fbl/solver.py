"""Turning excess-probability bounds into bounds on log M* and D*.

An epsilon-form bound is a nonincreasing map log M -> eps.  Achievability
bounds give an upper bound on log M*(n, d, eps) at the smallest log M with
eps_ach(log M) <= eps; converse bounds give a lower bound at the largest
log M with eps_conv(log M) > eps.  M is treated as a positive real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError, MonotonicityError
from .numerics import LN2

KINDS = ("converse", "achievability", "approximation")
LOGM_TOL = 1e-11
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class BoundValue:
    kind: str
    name: str
    log_M_nats: float
    n: int
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown bound kind {self.kind!r}")

    @property
    def rate_bits(self) -> float:
        return self.log_M_nats / (self.n * LN2)

    @property
    def rate_nats(self) -> float:
        return self.log_M_nats / self.n


INTEGER_LOG_M_MAX = 30.0


def _integer_log_m(log_m: float, kind: str) -> float:
    if not math.isfinite(log_m) or log_m > INTEGER_LOG_M_MAX:
        # past e^30 rounding moves log M by under 1e-13, below the bisection tolerance
        return log_m
    # nudge away from representation error before rounding
    if kind == "achievability":
        return math.log(math.ceil(math.exp(log_m) * (1 - 1e-12)))
    return math.log(max(1, math.floor(math.exp(log_m) * (1 + 1e-12))))


def spot_check_monotone(bound: Callable[[float], float], lo: float, hi: float, points: int = 5):
    xs = np.linspace(lo, hi, points)
    ys = [bound(float(x)) for x in xs]
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if y1 > y0 + MONOTONE_SLACK:
            raise MonotonicityError(
                f"bound increased from {y0:.6g} at log M={x0:.6g} to {y1:.6g} at log M={x1:.6g}"
            )


def rate_from_eps_bound(bound: Callable[[float], float], n: int, eps: float, kind: str,
                        name: str = "", log_alphabet: float = LN2, hi: float | None = None,
                        tol: float = LOGM_TOL, integer: bool = False) -> BoundValue:
    """Invert a nonincreasing log M -> eps map at level eps.

    The search bracket is [0, n ln|A| + 64] unless ``hi`` is given.  A
    converse whose eps stays above the target even as M -> infinity yields
    log M = inf, flagged ``infeasible`` in the diagnostics.
    """
    if kind not in ("converse", "achievability"):
        raise DomainError("only converse and achievability bounds can be inverted")
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    lo = 0.0
    hi = n * log_alphabet + 64.0 if hi is None else hi
    f_lo = bound(lo)
    if f_lo <= eps:
        log_m, iters = 0.0, 0
    else:
        if bound(hi) > eps:
            if kind == "converse" and bound(math.inf) > eps:
                # no code of any size reaches eps
                return BoundValue(kind, name, math.inf, n, {"iterations": 0, "infeasible": True})
            raise ConvergenceError(
                f"{name or kind}: no log M in [0, {hi:.6g}] reaches eps={eps}", achieved_tol=math.inf
            )
        spot_check_monotone(bound, lo, hi)
        iters = 0
        while hi - lo > tol and iters < 400:
            mid = 0.5 * (lo + hi)
            if bound(mid) <= eps:
                hi = mid
            else:
                lo = mid
            iters += 1
        log_m = hi if kind == "achievability" else lo
    if integer:
        log_m = _integer_log_m(log_m, kind)
    return BoundValue(kind, name, log_m, n, {"iterations": iters, "bracket": hi - lo})


@dataclass(frozen=True)
class DistortionBound:
    kind: str
    name: str
    d: float
    vacuous: bool = False


def distortion_from_bound(feasible: Callable[[float], bool], d_lo: float, d_hi: float,
                          kind: str, name: str = "", tol: float = 1e-10,
                          scan: int = 64) -> DistortionBound:
    """Smallest d at which ``feasible`` holds, by a coarse scan then bisection.

    ``feasible(d)`` should switch from False to True once as d grows; the
    scan locates the first feasible grid point, so families that lose
    monotonicity far above the crossing are still handled.  Achievability
    returns the upper end of the final bracket, converse the lower end.
    If nothing on the grid is feasible the result is flagged vacuous.
    """
    if feasible(d_lo):
        return DistortionBound(kind, name, d_lo)
    grid = np.linspace(d_lo, d_hi, scan + 1)
    hi = next((float(g) for g in grid[1:] if feasible(float(g))), None)
    if hi is None:
        return DistortionBound(kind, name, d_hi, vacuous=True)
    lo = float(grid[np.searchsorted(grid, hi) - 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return DistortionBound(kind, name, hi if kind == "achievability" else lo)
