"""Bounds for discrete memoryless sources under symbol error rate.

Letters are indexed so that P_X(1) >= ... >= P_X(m).  The hypothesis
testing converse and the constant-composition achievability enumerate all
n-types, so both refuse when C(n+m-1, m-1) exceeds ``TYPE_BUDGET``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .bounds_binary import floor_nd
from .bounds_core import SumDist, convolve_iid, converse_tilted, log_miss_power, rc_exact
from .errors import BudgetExceededError, DomainError
from .numerics import (LN2, compositions, count_compositions, log_add, log_hamming_ball,
                       log_sub, log_sum)
from .sources import (DMS, dispersion, dms_water_level, gaussian_approx_nats,
                      rate_distortion, tilted_info_dist)

TYPE_BUDGET = 10**7
HILL_CLIMB_MOVES = 10**4
# types this far (in nats) below the most likely one are treated as uncovered
PRUNE_LOG_PROB = 80.0


def _dms(pmf) -> DMS:
    return pmf if isinstance(pmf, DMS) else DMS(tuple(pmf))


def _check_edms(d, m):
    if m < 2:
        raise DomainError("alphabet size must be >= 2")
    if not (0 <= d < 1 - 1 / m):
        raise DomainError(f"equiprobable bounds need 0 <= d < 1 - 1/m = {1 - 1 / m}, got {d}")


def _check_dms(src: DMS, d):
    if not (0 < float(d) < 1 - src.pmf[0]):
        raise DomainError(f"DMS bounds need 0 < d < 1 - P(1) = {1 - src.pmf[0]}, got {d}")


def check_type_budget(n: int, m: int, budget: int = TYPE_BUDGET) -> int:
    count = count_compositions(n, m)
    if count > budget:
        raise BudgetExceededError(
            f"type enumeration needs C(n+m-1, m-1) = {count} types, above the cap {budget} "
            f"(n={n}, m={m})"
        )
    return count


def enumerate_types(n: int, m: int, budget: int = TYPE_BUDGET) -> np.ndarray:
    check_type_budget(n, m, budget)
    return compositions(n, m)


def type_log_counts(types: np.ndarray) -> np.ndarray:
    """ln of the multinomial coefficient n! / prod_a k_a! per type."""
    n = int(types[0].sum())
    return special.gammaln(n + 1) - special.gammaln(types + 1).sum(axis=1)


# --------------------------------------------------------------------------
# equiprobable source
# --------------------------------------------------------------------------

def log_edms_ball(n: int, d, m: int) -> float:
    """ln(m^{-n} S_{floor(nd)})."""
    return log_hamming_ball(n, floor_nd(n, d), m) - n * math.log(m)


def edms_converse(n: int, d, log_m: float, m: int) -> float:
    """eps >= 1 - M m^{-n} S_{floor(nd)}."""
    _check_edms(d, m)
    return max(0.0, -math.expm1(min(0.0, log_m + log_edms_ball(n, d, m))))


def edms_achievability(n: int, d, log_m: float, m: int) -> float:
    """eps <= (1 - m^{-n} S_{floor(nd)})^M."""
    _check_edms(d, m)
    return float(np.exp(log_miss_power(log_edms_ball(n, d, m), log_m)))


# --------------------------------------------------------------------------
# converses
# --------------------------------------------------------------------------

@lru_cache(maxsize=128)
def dms_tilted_sum(pmf: tuple, n: int, d) -> SumDist:
    td = tilted_info_dist(DMS(pmf), float(d))
    return convolve_iid(td.values, td.probs, n)


def dms_converse_tilted(pmf, n: int, d, log_m: float) -> float:
    src = _dms(pmf)
    _check_dms(src, d)
    return converse_tilted(dms_tilted_sum(src.pmf, n, d), log_m)


@lru_cache(maxsize=64)
def _sorted_type_groups(pmf: tuple, n: int):
    """Types grouped by equal probability, most likely group first.

    Returns (log per-string probability, log number of strings,
    log group mass) per group.
    """
    types = enumerate_types(n, len(pmf))
    logp = types @ np.log(np.array(pmf))
    log_cnt = type_log_counts(types)
    order = np.argsort(-logp, kind="stable")
    logp, log_cnt = logp[order], log_cnt[order]
    scale = np.maximum(1.0, np.abs(logp[1:]))
    starts = np.flatnonzero(np.concatenate([[True], np.abs(np.diff(logp)) > 1e-10 * scale]))
    g_logp = logp[starts]
    g_cnt = np.logaddexp.reduceat(log_cnt, starts)
    return g_logp, g_cnt, g_cnt + g_logp


def dms_ht_test(pmf, n: int, eps: float):
    """Randomised Neyman-Pearson test against the uniform law at level 1 - eps.

    Returns (index of the last fully accepted group or -1, alpha, ln of the
    accepted string count).
    """
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    src = _dms(pmf)
    _, g_cnt, g_mass = _sorted_type_groups(src.pmf, n)
    cum = np.logaddexp.accumulate(g_mass)
    target = math.log1p(-eps)
    below = np.flatnonzero(cum <= target)
    g_star = int(below[-1]) if len(below) else -1
    cum_star = float(cum[g_star]) if g_star >= 0 else -math.inf
    log_alpha = log_sub(target, cum_star) - g_mass[g_star + 1]
    log_accept = np.logaddexp.accumulate(g_cnt)
    base = float(log_accept[g_star]) if g_star >= 0 else -math.inf
    return g_star, math.exp(log_alpha), log_add(base, log_alpha + g_cnt[g_star + 1])


def dms_converse_ht(pmf, n: int, d, eps: float) -> float:
    """log M >= ln(accepted strings of the test) - ln S_{floor(nd)}."""
    src = _dms(pmf)
    if not (0 <= float(d) < 1 - src.pmf[0]):
        raise DomainError(f"DMS bounds need 0 <= d < 1 - P(1), got {d}")
    _, _, log_num = dms_ht_test(src, n, eps)
    return log_num - log_hamming_ball(n, floor_nd(n, d), src.m)


# --------------------------------------------------------------------------
# constant-composition achievability
# --------------------------------------------------------------------------

def round_composition(weights, n: int) -> np.ndarray:
    """Integer composition of n near n * weights.

    Every entry is floored, and the remaining units go to the letters with
    the smallest weight first.  For two letters this rounds the smaller
    share up.
    """
    w = np.asarray(weights, dtype=float)
    t = np.floor(n * w + 1e-9).astype(np.int64)
    support = np.flatnonzero(w > 0)
    left = n - int(t.sum())
    by_weight = support[np.argsort(w[support], kind="stable")]
    i = 0
    while left < 0:
        j = by_weight[::-1][i % len(by_weight)]
        if t[j] > 0:
            t[j] -= 1
            left += 1
        i += 1
    i = 0
    while left > 0:
        t[by_weight[i % len(by_weight)]] += 1
        left -= 1
        i += 1
    return t


class _Transport:
    """Integer m x m_eta matrices with fixed margins; 2x2 exchange moves."""

    def __init__(self, m: int, m_eta: int):
        self.m, self.m_eta = m, m_eta
        idx = [(a, a2, b, b2) for a in range(m) for a2 in range(m) if a != a2
               for b in range(m_eta) for b2 in range(m_eta) if b != b2]
        self.A, self.A2, self.B, self.B2 = (np.array(x) for x in zip(*idx))
        diag = lambda r, c: (r == c).astype(int)  # noqa: E731
        # diagonal change when a unit moves from (a,b2),(a2,b) to (a,b),(a2,b2)
        self.gain = (diag(self.A, self.B) + diag(self.A2, self.B2)
                     - diag(self.A, self.B2) - diag(self.A2, self.B))

    def move_scores(self, T):
        with np.errstate(divide="ignore"):
            lt = np.log(T.astype(float))
        return (lt[self.A, self.B2] + lt[self.A2, self.B]
                - np.log(T[self.A, self.B] + 1.0) - np.log(T[self.A2, self.B2] + 1.0))

    def apply(self, T, i):
        a, a2, b, b2 = self.A[i], self.A2[i], self.B[i], self.B2[i]
        T[a, b] += 1
        T[a2, b2] += 1
        T[a, b2] -= 1
        T[a2, b] -= 1


def _round_to_margins(T0, rows, cols):
    T = np.floor(np.maximum(T0, 0.0) + 1e-9).astype(np.int64)
    for axis, target in ((1, rows), (0, cols)):
        excess = T.sum(axis=axis) - target
        for i in np.flatnonzero(excess > 0):
            line = T[i] if axis == 1 else T[:, i]
            ref = T0[i] if axis == 1 else T0[:, i]
            for _ in range(int(excess[i])):
                cand = np.flatnonzero(line > 0)
                j = cand[np.argmax(line[cand] - ref[cand])]
                line[j] -= 1
    row_def = rows - T.sum(axis=1)
    col_def = cols - T.sum(axis=0)
    while row_def.sum() > 0:
        ok = np.outer(row_def > 0, col_def > 0)
        score = np.where(ok, T0 - T, -np.inf)
        a, b = np.unravel_index(np.argmax(score), T.shape)
        T[a, b] += 1
        row_def[a] -= 1
        col_def[b] -= 1
    return T


def best_joint_type(k, t_star, pmf, wl, n: int, D: int, transport: _Transport | None = None):
    """Joint counts t_{a,b} for a source type k and codeword type t*.

    Starts from the rounded target, enforces the margins and the diagonal
    floor n - D, then hill-climbs prod_a C(k_a; t_{a,.}).  Returns None if
    no matrix meets the diagonal floor.
    """
    m, m_eta = len(pmf), wl.m_eta
    k = np.asarray(k, dtype=np.int64)
    t_star = np.asarray(t_star, dtype=np.int64)[:m_eta]
    need = n - D
    if sum(min(int(k[b]), int(t_star[b])) for b in range(m_eta)) < need:
        return None
    tr = transport or _Transport(m, m_eta)
    delta = k / n - np.asarray(pmf)
    spill = delta[m_eta:].sum()
    dab = np.repeat((delta / m_eta)[:, None], m_eta, axis=1)
    for a in range(m_eta):
        for b in range(m_eta):
            dab[a, b] += spill / m_eta ** 2 if a == b else -spill / (m_eta ** 2 * (m_eta - 1))
    T0 = wl.p_x_given_y[:, :m_eta] * t_star[None, :] + dab * n
    T = _round_to_margins(T0, k, t_star)
    diag = int(np.trace(T[:m_eta, :m_eta]))
    while diag < need:
        scores = tr.move_scores(T)
        scores = np.where((tr.gain > 0) & np.isfinite(scores), scores + 1e3 * tr.gain, -np.inf)
        i = int(np.argmax(scores))
        if not np.isfinite(scores[i]):
            return None
        tr.apply(T, i)
        diag += int(tr.gain[i])
    for _ in range(HILL_CLIMB_MOVES):
        scores = tr.move_scores(T)
        scores = np.where(diag + tr.gain >= need, scores, -np.inf)
        i = int(np.argmax(scores))
        if not scores[i] > 1e-12:
            break
        tr.apply(T, i)
        diag += int(tr.gain[i])
    return T


def log_joint_count(k, T) -> float:
    """ln prod_a k_a! / prod_b t_{a,b}!."""
    return float(special.gammaln(np.asarray(k) + 1.0).sum() - special.gammaln(T + 1.0).sum())


@lru_cache(maxsize=32)
def dms_cc_tables(pmf: tuple, n: int, d):
    """(log type probability, log ball-mass lower bound) over all n-types."""
    src = DMS(pmf)
    wl = dms_water_level(pmf, float(d))
    t_star = round_composition(wl.p_y, n)
    D = floor_nd(n, d)
    types = enumerate_types(n, src.m)
    log_prob = type_log_counts(types) + types @ np.log(np.array(pmf))
    log_norm = special.gammaln(n + 1) - special.gammaln(t_star[: wl.m_eta] + 1.0).sum()
    keep = log_prob >= log_prob.max() - PRUNE_LOG_PROB
    log_w = np.full(len(types), -np.inf)
    tr = _Transport(src.m, wl.m_eta)
    for i in np.flatnonzero(keep):
        T = best_joint_type(types[i], t_star, pmf, wl, n, D, tr)
        if T is not None:
            log_w[i] = log_joint_count(types[i], T) - log_norm
    log_prob.setflags(write=False)
    log_w.setflags(write=False)
    return log_prob, log_w


def dms_achievability_cc(pmf, n: int, d, log_m: float) -> float:
    """Random coding with M codewords drawn uniformly from the strings of
    type t* (the rounded R(d)-achieving output composition)."""
    src = _dms(pmf)
    _check_dms(src, d)
    log_prob, log_w = dms_cc_tables(src.pmf, n, d)
    return rc_exact(log_w, log_prob, log_m)


def dms_gaussian_approx(pmf, n: int, d, eps: float, remainder: str = "auto") -> float:
    """Gaussian approximation in bits per symbol.

    ``auto`` uses +1/2 ln(n)/n for an equiprobable source, -1/2 ln(n)/n at
    d = 0, and no remainder otherwise.  ``dms_envelope`` is
    (m-1)(m_eta-1)/2 ln(n)/n + ln ln(n)/n.
    """
    src = _dms(pmf)
    d = float(d)
    if remainder == "auto":
        if d == 0:
            remainder = "minus_half_log_n"
        else:
            remainder = "half_log_n" if src.equiprobable else "zero"
    coeff = 0.5
    if remainder == "dms_envelope":
        wl = dms_water_level(src.pmf, d)
        coeff = (src.m - 1) * (wl.m_eta - 1) / 2.0
        remainder = "envelope"
    R = rate_distortion(src, d)
    V = dispersion(src, d)
    return gaussian_approx_nats(R, V, n, eps, remainder, log_coeff=coeff) / LN2
