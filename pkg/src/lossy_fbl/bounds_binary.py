"""Bounds for the binary memoryless source with bit error rate distortion.

Every epsilon-form bound takes ``log_m`` (natural log of the code size,
real valued) and returns an excess-distortion probability.  Converse
bounds in direct form return a lower bound on log M.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import optimize, special, stats

from .bounds_core import (SumDist, convolve_iid, converse_tilted, log_miss_power, rc_exact,
                          shannon_ach_from_sums)
from .errors import ConvergenceError, DomainError, LossyFBLError
from .numerics import (LN2, LOG_ZERO, binary_entropy, binom_logpmf_array, log_add,
                       log_binomial, log_binomial_array, log_partial_binom_sum, log_sub)
from .sources import BMS, dispersion, gaussian_approx_nats, rate_distortion, tilted_info_dist

LN_BITS = 1.0 / LN2


def floor_nd(n: int, d) -> int:
    """floor(n d); exact for Fraction d, float d absorbs representation error."""
    if isinstance(d, Fraction):
        return math.floor(n * d)
    return math.floor(n * d + 1e-9)


def ceil_nq(n: int, q: float) -> int:
    return math.ceil(n * q - 1e-9)


def _check_ebms(d):
    if not (0 <= d < 0.5):
        raise DomainError(f"equiprobable binary bounds need 0 <= d < 1/2, got {d}")


def _check_bms(p, d):
    if not (0 < p <= 0.5):
        raise DomainError(f"BMS needs 0 < p <= 1/2, got p={p}")
    if not (0 <= d < p):
        raise DomainError(f"BMS bounds need 0 <= d < p (d={d}, p={p}); d >= p is the zero-information regime")


def log_ebms_ball(n: int, d) -> float:
    """ln(2^{-n} <n | floor(nd)>)."""
    return log_partial_binom_sum(n, floor_nd(n, d)) - n * LN2


# --------------------------------------------------------------------------
# equiprobable source
# --------------------------------------------------------------------------

def ebms_converse(n: int, d, log_m: float) -> float:
    """eps >= 1 - M 2^{-n} <n | floor(nd)>."""
    _check_ebms(d)
    return max(0.0, -math.expm1(min(0.0, log_m + log_ebms_ball(n, d))))


def ebms_converse_logm(n: int, d, eps: float) -> float:
    """Direct form: log M >= ln(1 - eps) - ln(2^{-n} <n | floor(nd)>)."""
    _check_ebms(d)
    return math.log1p(-eps) - log_ebms_ball(n, d)


def ebms_achievability(n: int, d, log_m: float) -> float:
    """eps <= (1 - 2^{-n} <n | floor(nd)>)^M (exact random coding)."""
    _check_ebms(d)
    return float(np.exp(log_miss_power(log_ebms_ball(n, d), log_m)))


# --------------------------------------------------------------------------
# nonequiprobable source
# --------------------------------------------------------------------------

@lru_cache(maxsize=256)
def bms_tilted_sum(p: float, n: int, d) -> SumDist:
    td = tilted_info_dist(BMS(p), float(d))
    return convolve_iid(td.values, td.probs, n)


def bms_converse_tilted(p: float, n: int, d, log_m: float) -> float:
    """d-tilted converse with sum_i j(X_i, d) = Z ln(1/p) + (n-Z) ln(1/(1-p)) - n h(d)."""
    _check_bms(p, d)
    return converse_tilted(bms_tilted_sum(p, n, d), log_m)


def bms_ht_test(p: float, n: int, eps: float):
    """Neyman-Pearson test against the uniform law: (r*, alpha, ln numerator).

    r* is the largest weight with P[Bin(n,p) <= r*] <= 1 - eps (-1 if none);
    the numerator is <n|r*> + alpha C(n, r*+1).
    """
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    lp = binom_logpmf_array(n, p)
    logcdf = np.logaddexp.accumulate(lp)
    target = math.log1p(-eps)
    below = np.flatnonzero(logcdf <= target)
    r_star = int(below[-1]) if len(below) else -1
    cum = float(logcdf[r_star]) if r_star >= 0 else LOG_ZERO
    log_gap = log_sub(target, cum)
    log_alpha = log_gap - lp[r_star + 1]
    alpha = math.exp(log_alpha)
    log_num = log_add(log_partial_binom_sum(n, r_star), log_alpha + log_binomial(n, r_star + 1))
    return r_star, alpha, log_num


def bms_converse_ht(p: float, n: int, d, eps: float) -> float:
    """log M >= ln(<n|r*> + alpha C(n, r*+1)) - ln <n | floor(nd)>."""
    _check_bms(p, d)
    _, _, log_num = bms_ht_test(p, n, eps)
    return log_num - log_partial_binom_sum(n, floor_nd(n, d))


def _rd_output_bias(p: float, d: float) -> float:
    return (p - float(d)) / (1 - 2 * float(d))


def _log_overlap_count(n: int, k, t, D: int):
    """ln L_n(k, t): ln C(k, t0) C(n-k, t-t0) with t0 = ceil((t+k-D)/2)^+
    when t - D <= k <= t + D, and -inf otherwise."""
    k = np.asarray(k)
    t = np.asarray(t)
    t0 = np.maximum(0, (t + k - D + 1) // 2)
    ok = (t - D <= k) & (k <= t + D)
    out = log_binomial_array(k, t0) + log_binomial_array(n - k, t - t0)
    return np.where(ok, out, -np.inf)


@lru_cache(maxsize=256)
def bms_ball_log_mass(p: float, n: int, d) -> np.ndarray:
    """ln of the ball-mass lower bound sum_t L_n(k,t) q^t (1-q)^{n-t}, per weight k."""
    q = _rd_output_bias(p, d)
    D = floor_nd(n, d)
    k = np.arange(n + 1)[:, None]
    t = np.arange(n + 1)[None, :]
    with np.errstate(divide="ignore"):
        lq = math.log(q) if q > 0 else -np.inf
        l1q = math.log1p(-q)
        weight = np.where(t > 0, t * lq, 0.0) + (n - t) * l1q
    out = special.logsumexp(_log_overlap_count(n, k, t, D) + weight, axis=1)
    out.setflags(write=False)
    return out


def bms_achievability(p: float, n: int, d, log_m: float) -> float:
    """Random coding with i.i.d. Bernoulli(q) codewords, q = (p-d)/(1-2d)."""
    _check_bms(p, d)
    return rc_exact(bms_ball_log_mass(p, n, d), binom_logpmf_array(n, p), log_m)


@lru_cache(maxsize=256)
def bms_cc_ball_log_mass(p: float, n: int, d) -> np.ndarray:
    q = _rd_output_bias(p, d)
    t = ceil_nq(n, q)
    k = np.arange(n + 1)
    out = _log_overlap_count(n, k, t, floor_nd(n, d)) - log_binomial(n, t)
    out.setflags(write=False)
    return out


def bms_achievability_cc(p: float, n: int, d, log_m: float) -> float:
    """Constant-composition random coding with codewords of weight ceil(nq)."""
    _check_bms(p, d)
    return rc_exact(bms_cc_ball_log_mass(p, n, d), binom_logpmf_array(n, p), log_m)


def binary_gaussian_approx(p: float, n: int, d, eps: float, remainder: str = "auto") -> float:
    """Gaussian approximation of the minimal rate, in bits per symbol.

    ``auto`` picks +1/2 ln(n)/n for the equiprobable source at d > 0, the
    zero-dispersion form at d = 0 when p = 1/2, -1/2 ln(n)/n for lossless
    nonequiprobable coding, and no remainder otherwise.
    """
    src = BMS(p)
    d = float(d)
    if remainder == "auto":
        if p == 0.5:
            remainder = "zero_dispersion" if d == 0 else "half_log_n"
        else:
            remainder = "minus_half_log_n" if d == 0 else "zero"
    R = rate_distortion(src, d)
    V = dispersion(src, d)
    return gaussian_approx_nats(R, V, n, eps, remainder) * LN_BITS


# --------------------------------------------------------------------------
# classical random-coding bound
# --------------------------------------------------------------------------

_UNREACHED = 1e300

# atoms of the information-density law below this probability are dropped
SHANNON_ATOM_FLOOR = 1e-30


@lru_cache(maxsize=512)
def bms_shannon_info_sum(p: float, n: int, d_test: float) -> SumDist:
    """Law of the summed information density under the R(d_test)-achieving
    joint distribution.

    With w ones in the source string and e letter errors,
    sum iota = (n-e) ln(1-d') + e ln d' - (n-w) ln(1-p) - w ln p.
    """
    q = _rd_output_bias(p, d_test)
    err1 = (1 - q) * d_test / p          # P[error | x = 1]
    err0 = q * d_test / (1 - p)          # P[error | x = 0]
    pw = np.exp(binom_logpmf_array(n, p))
    ln1d, lnd = math.log1p(-d_test), math.log(d_test)
    vals, probs = [], []
    for w in np.flatnonzero(pw > SHANNON_ATOM_FLOOR):
        w = int(w)
        pe = pw[w] * np.convolve(np.exp(binom_logpmf_array(w, err1)),
                                 np.exp(binom_logpmf_array(n - w, err0)))
        e = np.flatnonzero(pe > SHANNON_ATOM_FLOOR)
        vals.append((n - e) * ln1d + e * lnd - (n - w) * math.log1p(-p) - w * math.log(p))
        probs.append(pe[e])
    return SumDist.from_atoms(np.concatenate(vals), np.log(np.concatenate(probs)))


def bms_shannon_ach_at(p: float, n: int, d, d_test: float, log_m: float) -> float:
    """Classical bound with the R(d_test)-achieving test channel, 0 < d_test <= d."""
    excess = float(stats.binom.sf(floor_nd(n, d), n, d_test))
    return shannon_ach_from_sums(bms_shannon_info_sum(p, n, d_test), excess, log_m)


def bms_shannon_logm(p: float, n: int, d, eps: float, grid: int = 10):
    """Smallest log M certified by the classical bound, minimised over the
    test-channel parameter d' in (0, d].  Returns (log M, d')."""
    from .solver import rate_from_eps_bound
    d = float(d)
    if not (0 < d < p):
        raise DomainError(f"classical bound needs 0 < d < p, got d={d}, p={p}")

    def logm(dt):
        try:
            return rate_from_eps_bound(lambda lm: bms_shannon_ach_at(p, n, d, dt, lm),
                                       n, eps, "achievability", "shannon-ach").log_M_nats
        except LossyFBLError:
            return _UNREACHED

    xs = np.linspace(d / grid, d, grid)
    ys = np.array([logm(float(x)) for x in xs])
    i = int(np.argmin(ys))
    if ys[i] >= _UNREACHED:
        raise ConvergenceError(f"classical bound does not reach eps={eps} at n={n}")
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid - 1)])
    best_x, best_y = float(xs[i]), float(ys[i])
    if b > a:
        res = optimize.minimize_scalar(logm, bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-4 * d})
        if res.fun < best_y:
            best_x, best_y = float(res.x), float(res.fun)
    return best_y, best_x
