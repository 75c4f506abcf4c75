"""Source-generic bound engines.

* ``SumDist``/``convolve_iid``: exact law of a sum of n i.i.d. discrete
  variables, by enumerating count vectors with multinomial weights.
* ``converse_tilted``: the d-tilted-information converse
  eps >= sup_g P[S >= log M + g] - e^{-g}, maximised exactly over the jump
  points of the step function.
* ``rc_exact``/``rc_relaxed``: excess probability of random coding,
  E[(1 - W)^M] and its relaxation E[exp(-M W)], for a ball-mass law W.
* ``ht_converse``: log M >= log beta - log(max ball mass).
* ``shannon_ach``: the classical random-coding bound, for discrete
  per-letter joints.

Ball masses and M are carried in the log domain throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import BudgetExceededError
from .numerics import compositions, count_compositions

CONVOLUTION_BUDGET = 10**7


@dataclass(frozen=True)
class SumDist:
    """Law of S = Z_1 + ... + Z_n on a finite sorted support."""

    values: np.ndarray
    log_pmf: np.ndarray
    log_sf: np.ndarray = field(repr=False)  # ln P[S >= values[i]]

    @classmethod
    def from_atoms(cls, values, log_pmf, merge_tol: float = 1e-12) -> "SumDist":
        values = np.asarray(values, dtype=float)
        log_pmf = np.asarray(log_pmf, dtype=float)
        order = np.argsort(values, kind="stable")
        values, log_pmf = values[order], log_pmf[order]
        if len(values) > 1:
            scale = np.maximum(1.0, np.abs(values[1:]))
            new_group = np.concatenate([[True], np.diff(values) > merge_tol * scale])
            if not new_group.all():
                starts = np.flatnonzero(new_group)
                log_pmf = np.logaddexp.reduceat(log_pmf, starts)
                values = values[starts]
        log_sf = np.logaddexp.accumulate(log_pmf[::-1])[::-1]
        return cls(values, log_pmf, log_sf)

    def total_mass(self) -> float:
        return float(np.exp(self.log_sf[0])) if len(self.values) else 0.0

    def mean(self) -> float:
        return float((self.values * np.exp(self.log_pmf)).sum())

    def _tol(self, t):
        return 1e-10 * max(1.0, abs(t))

    def prob_ge(self, t: float) -> float:
        """P[S >= t], with ties at t (up to rounding) counted."""
        i = np.searchsorted(self.values, t - self._tol(t), side="left")
        return float(np.exp(self.log_sf[i])) if i < len(self.values) else 0.0

    def prob_gt(self, t: float) -> float:
        """P[S > t], with ties at t (up to rounding) excluded."""
        i = np.searchsorted(self.values, t + self._tol(t), side="right")
        return float(np.exp(self.log_sf[i])) if i < len(self.values) else 0.0


def convolve_iid(values, probs, n: int, budget: int = CONVOLUTION_BUDGET) -> SumDist:
    """Exact n-fold convolution of a discrete law with atoms (values, probs)."""
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    keep = probs > 0
    values, probs = values[keep], probs[keep]
    k = len(values)
    if k == 0:
        raise ValueError("empty distribution")
    if k > 8:
        raise BudgetExceededError(f"{k} distinct atoms; convolve_iid handles at most 8")
    count = count_compositions(n, k)
    if count > budget:
        raise BudgetExceededError(
            f"exact convolution needs {count} count vectors (> budget {budget}); "
            "use the Berry-Esseen diagnostic instead"
        )
    if k == 1:
        return SumDist.from_atoms([n * values[0]], [0.0])
    counts = compositions(n, k)
    logp = np.log(probs)
    log_w = (special.gammaln(n + 1) - special.gammaln(counts + 1).sum(axis=1)
             + counts @ logp)
    return SumDist.from_atoms(counts @ values, log_w)


def converse_tilted(dist: SumDist, log_m: float) -> float:
    """sup_{g >= 0} { P[S >= log M + g] - e^{-g} }, clamped to [0, 1].

    P[S >= t] is constant on each (s_{i-1}, s_i] while e^{-g} decreases, so
    the supremum sits at some jump point g = s_i - log M >= 0.
    """
    if log_m == math.inf:
        return 0.0
    i0 = np.searchsorted(dist.values, log_m, side="left")
    if i0 >= len(dist.values):
        return 0.0
    gam = dist.values[i0:] - log_m
    obj = np.exp(dist.log_sf[i0:]) - np.exp(-gam)
    return float(min(1.0, max(0.0, obj.max())))


def log_miss_power(log_w, log_m):
    """M * ln(1 - w), elementwise, for w = e^{log_w} and M = e^{log_m}.

    Stable for tiny w (M w may be large while w underflows) and exact 0
    contribution (-inf) when w = 1.
    """
    log_w = np.asarray(log_w, dtype=float)
    if log_m == -math.inf:
        return np.zeros_like(log_w)
    small = log_w < -20.0
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        w = np.exp(log_w)
        big = np.exp(log_m) * np.log1p(-np.minimum(w, 1.0))
        tiny = -np.exp(log_m + log_w) * (1.0 + 0.5 * w)
    out = np.where(small, tiny, big)
    out = np.where(log_w >= 0.0, -np.inf, out)
    return np.where(np.isnan(out), -np.inf, out)


def rc_exact(log_w, log_prob, log_m: float) -> float:
    """E[(1 - W)^M] for W with atoms e^{log_w} of probability e^{log_prob}."""
    terms = np.asarray(log_prob, dtype=float) + log_miss_power(log_w, log_m)
    return float(min(1.0, np.exp(special.logsumexp(terms))))


def rc_relaxed(log_w, log_prob, log_m: float) -> float:
    """E[exp(-M W)] >= E[(1 - W)^M]."""
    log_w = np.asarray(log_w, dtype=float)
    if log_m == -math.inf:
        return float(min(1.0, np.exp(special.logsumexp(log_prob))))
    with np.errstate(over="ignore"):
        terms = np.asarray(log_prob, dtype=float) - np.exp(log_m + log_w)
    return float(min(1.0, np.exp(special.logsumexp(terms))))


def ht_converse(log_beta: float, log_max_ball: float) -> float:
    """Hypothesis-testing converse: log M >= log beta - log sup_y Q[ball]."""
    return log_beta - log_max_ball


@dataclass(frozen=True)
class PerLetterJoint:
    """Per-letter joint law of (information density, distortion)."""

    iota: np.ndarray
    dist: np.ndarray
    prob: np.ndarray


def shannon_ach_from_sums(info_sum: SumDist, distortion_excess: float, log_m: float) -> float:
    """P[sum d_i > n d] + inf_{g > 0} { P[sum iota_i > log M - g] + exp(-e^g) }.

    P[S > log M - g] is a step function nondecreasing in g, so the infimum
    is attained at the right end of a constancy interval: g = log M - s_i
    for support points s_i < log M.
    """
    if log_m == math.inf:
        return min(1.0, distortion_excess)
    vals = info_sum.values
    i1 = np.searchsorted(vals, log_m, side="left")
    if i1 == 0:
        return 1.0
    gam = log_m - vals[:i1]
    # P[S > s_i] = P[S >= s_{i+1}]
    tail = np.append(np.exp(info_sum.log_sf), 0.0)[1:i1 + 1]
    with np.errstate(over="ignore"):
        second = tail + np.exp(-np.exp(gam))
    return float(min(1.0, distortion_excess + second.min()))


def shannon_ach(joint: PerLetterJoint, n: int, d: float, log_m: float,
                budget: int = CONVOLUTION_BUDGET) -> float:
    """Classical random-coding bound for an i.i.d. per-letter joint law."""
    info = convolve_iid(*_merge(joint.iota, joint.prob), n, budget)
    dist = convolve_iid(*_merge(joint.dist, joint.prob), n, budget)
    return shannon_ach_from_sums(info, dist.prob_gt(n * d), log_m)


def _merge(values, probs):
    td = SumDist.from_atoms(values, np.log(np.asarray(probs, dtype=float)))
    return td.values, np.exp(td.log_pmf)
