"""Log-domain combinatorics, special functions and 1-D numerical routines.

Every probability mass that can under- or overflow a double is carried as
its natural logarithm (a ``LogReal``); ``-inf`` encodes zero.  Partial
binomial sums and Hamming-ball sizes are built by forward log-sum-exp
accumulation and cached per ``(n, m)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import special

from .errors import ConvergenceError, DomainError

LogReal = float
LOG_ZERO: LogReal = -math.inf

LN2 = math.log(2.0)


# --------------------------------------------------------------------------
# log-domain arithmetic
# --------------------------------------------------------------------------

def log_add(a: LogReal, b: LogReal) -> LogReal:
    """ln(e^a + e^b)."""
    if a < b:
        a, b = b, a
    if b == LOG_ZERO:
        return a
    return a + math.log1p(math.exp(b - a))


def log_sub(a: LogReal, b: LogReal) -> LogReal:
    """ln(e^a - e^b); requires a >= b."""
    if b > a:
        raise DomainError(f"log_sub needs a >= b, got a={a}, b={b}")
    if b == LOG_ZERO:
        return a
    if a == b:
        return LOG_ZERO
    return a + math.log1p(-math.exp(b - a))


def log_sum(values) -> LogReal:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return LOG_ZERO
    return float(special.logsumexp(values))


def log1mexp(x):
    """ln(1 - e^x) for x <= 0, accurate near both ends."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > -LN2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))
    return out if out.ndim else float(out)


def binary_entropy(x: float) -> float:
    """h(x) in nats, with h(0) = h(1) = 0."""
    if x < 0 or x > 1:
        raise DomainError(f"binary entropy needs x in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log1p(-x)


# --------------------------------------------------------------------------
# combinatorics
# --------------------------------------------------------------------------

def log_binomial(n: int, k: int) -> LogReal:
    if not (0 <= k <= n):
        raise DomainError(f"log_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_binomial_array(n, k):
    """Vectorised ln C(n, k); -inf wherever k < 0 or k > n."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    valid = (k >= 0) & (k <= n)
    kk = np.where(valid, k, 0.0)
    nn = np.where(valid, n, 0.0)
    out = special.gammaln(nn + 1) - special.gammaln(kk + 1) - special.gammaln(nn - kk + 1)
    return np.where(valid, out, -np.inf)


@lru_cache(maxsize=8192)
def _log_ball_row(n: int, m: int) -> np.ndarray:
    """ln S_k for k = 0..n, S_k = sum_{j<=k} C(n,j) (m-1)^j."""
    j = np.arange(n + 1)
    terms = log_binomial_array(n, j) + j * math.log(m - 1)
    row = np.logaddexp.accumulate(terms)
    row.setflags(write=False)
    return row


def log_hamming_ball(n: int, k: int, m: int = 2) -> LogReal:
    """ln of the number of m-ary n-strings within Hamming distance k."""
    if m < 2 or n < 0:
        raise DomainError(f"log_hamming_ball needs m >= 2, n >= 0; got n={n}, m={m}")
    if k < 0:
        return LOG_ZERO
    if k >= n:
        return n * math.log(m)
    return float(_log_ball_row(n, m)[k])


def log_partial_binom_sum(n: int, k: int) -> LogReal:
    """ln <n|k> = ln sum_{j=0}^{k} C(n, j), with <n|k> = 0 for k < 0 and
    <n|k> = 2^n for k > n."""
    return log_hamming_ball(n, k, 2)


def log_hamming_ball_array(n: int, k, m: int = 2) -> np.ndarray:
    """Vectorised log_hamming_ball over an integer array of radii."""
    k = np.asarray(k)
    row = _log_ball_row(n, m)
    idx = np.clip(k, 0, n)
    out = row[idx].astype(float)
    out = np.where(k < 0, -np.inf, out)
    return np.where(k >= n, n * math.log(m), out)


def log_multinomial(counts: Sequence[int]) -> LogReal:
    n = sum(counts)
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)


def compositions(n: int, k: int) -> np.ndarray:
    """All length-k nonnegative integer vectors summing to n, as rows."""
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for first in range(n, -1, -1):
        rest = compositions(n - first, k - 1)
        rows.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(rows)


def count_compositions(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


# --------------------------------------------------------------------------
# Gaussian tail
# --------------------------------------------------------------------------

def q_func(t):
    """Standard Gaussian complementary cdf Q(t)."""
    out = special.ndtr(-np.asarray(t, dtype=float))
    return out if np.ndim(out) else float(out)


def q_inv(eps: float) -> float:
    """Inverse of Q; ndtri start plus one Newton polish on Q."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"q_inv needs eps in (0,1), got {eps}")
    t = -float(special.ndtri(eps))
    phi = math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi)
    if phi > 0:
        t += (q_func(t) - eps) / phi
    return t


# --------------------------------------------------------------------------
# chi-square
# --------------------------------------------------------------------------

def _check_dof(n):
    if n < 1:
        raise DomainError(f"chi-square needs n >= 1 degrees of freedom, got {n}")


def chi2_cdf(n: int, x: float) -> float:
    _check_dof(n)
    if x <= 0:
        return 0.0
    return float(special.gammainc(n / 2.0, x / 2.0))


def chi2_sf(n: int, x: float) -> float:
    _check_dof(n)
    if x <= 0:
        return 1.0
    return float(special.gammaincc(n / 2.0, x / 2.0))


def chi2_logpdf(n: int, x):
    _check_dof(n)
    x = np.asarray(x, dtype=float)
    k = n / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (k - 1) * np.log(x) - x / 2.0 - k * LN2 - special.gammaln(k)
    out = np.where(x > 0, out, -np.inf if n > 2 else (-LN2 if n == 2 else np.inf))
    return out if out.ndim else float(out)


def chi2_pdf(n: int, x):
    out = np.exp(chi2_logpdf(n, x))
    return out if np.ndim(out) else float(out)


def chi2_quantile(n: int, p: float, rtol: float = 1e-10) -> float:
    """x with chi2_cdf(n, x) = p."""
    _check_dof(n)
    if not (0.0 < p < 1.0):
        raise DomainError(f"chi2_quantile needs p in (0,1), got {p}")
    if p > 0.5:
        return chi2_isf(n, 1.0 - p, rtol)
    x = 2.0 * float(special.gammaincinv(n / 2.0, p))
    for _ in range(4):
        dens = chi2_pdf(n, x)
        if dens <= 0:
            break
        step = (chi2_cdf(n, x) - p) / dens
        x = max(x - step, x / 2)
        if abs(step) <= rtol * x:
            break
    return x


def chi2_isf(n: int, q: float, rtol: float = 1e-10) -> float:
    """x with chi2_sf(n, x) = q; accurate for tiny q."""
    _check_dof(n)
    if not (0.0 < q < 1.0):
        raise DomainError(f"chi2_isf needs q in (0,1), got {q}")
    x = 2.0 * float(special.gammainccinv(n / 2.0, q))
    for _ in range(4):
        dens = chi2_pdf(n, x)
        if dens <= 0:
            break
        step = (q - chi2_sf(n, x)) / dens
        x = max(x - step, x / 2)
        if abs(step) <= rtol * x:
            break
    return x


# --------------------------------------------------------------------------
# binomial
# --------------------------------------------------------------------------

def binom_logpmf_array(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = math.log(p) if p > 0 else -np.inf
        lq = math.log1p(-p) if p < 1 else -np.inf
        out = log_binomial_array(n, k) + np.where(k > 0, k * lp, 0.0) + np.where(k < n, (n - k) * lq, 0.0)
    return out


def binom_cdf(n: int, p: float, r: int) -> float:
    """P[Bin(n, p) <= r] by log-domain summation."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"binom_cdf needs p in [0,1], got {p}")
    if r < 0:
        return 0.0
    if r >= n:
        return 1.0
    lp = binom_logpmf_array(n, p)
    lower = special.logsumexp(lp[: r + 1])
    upper = special.logsumexp(lp[r + 1:])
    # take the smaller side directly to keep precision in both tails
    if lower < upper:
        return float(math.exp(lower))
    return float(-math.expm1(upper))


def berry_esseen_window(mu: float, V: float, T: float, n: int, t: float):
    """Normal estimate Q(t) of P[sum Z_i > n(mu + t sqrt(V/n))] and the
    Berry-Esseen radius 6 T / V^{3/2} / sqrt(n).  Diagnostic only."""
    if V <= 0:
        raise DomainError("Berry-Esseen window needs a nondegenerate distribution (V > 0)")
    if not math.isfinite(T):
        raise DomainError("Berry-Esseen window needs a finite third absolute moment")
    return q_func(t), 6.0 * T / V ** 1.5 / math.sqrt(n)


# --------------------------------------------------------------------------
# 1-D optimisation, root finding and quadrature
# --------------------------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _finite(x, fx):
    if not math.isfinite(fx):
        raise ConvergenceError(f"objective is not finite at x={x!r}: {fx!r}")
    return fx


def maximize_1d(f: Callable[[float], float], lo: float, hi: float,
                tol: float = 1e-10, grid: int = 256):
    """Coarse grid then golden-section refinement of the best bracket.

    Returns (argmax, max).
    """
    if not lo < hi:
        raise DomainError(f"maximize_1d needs lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, max(grid, 3))
    fs = [_finite(x, f(float(x))) for x in xs]
    i = int(np.argmax(fs))
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, len(xs) - 1)])
    best_x, best_f = float(xs[i]), fs[i]
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = _finite(c, f(c)), _finite(d, f(d))
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = _finite(c, f(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = _finite(d, f(d))
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def bisect_decreasing(g: Callable[[float], float], target: float, lo: float, hi: float,
                      tol: float = 1e-10, max_iter: int = 200):
    """For nonincreasing g with g(lo) > target >= g(hi), shrink [lo, hi]
    around the crossing.  Returns the final (lo, hi)."""
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if g(mid) <= target:
            hi = mid
        else:
            lo = mid
    return lo, hi


def integrate(f: Callable[[float], float], lo: float, hi: float,
              abs_tol: float = 1e-10, rel_tol: float = 1e-9,
              points: Sequence[float] | None = None, limit: int = 500) -> float:
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) with a hard error check."""
    if not lo < hi:
        raise DomainError(f"integrate needs lo < hi, got [{lo}, {hi}]")
    pts = None
    if points is not None:
        pts = sorted(p for p in points if lo < p < hi)
    kwargs = dict(epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1)
    if pts and math.isfinite(hi):
        kwargs["points"] = pts
    res = _integrate.quad(f, lo, hi, **kwargs)
    value, err = res[0], res[1]
    if not math.isfinite(value):
        raise ConvergenceError("quadrature produced a non-finite value")
    if err > 10 * max(abs_tol, rel_tol * abs(value)):
        raise ConvergenceError(
            f"quadrature did not reach tolerance (estimated error {err:.3g})", achieved_tol=err
        )
    return float(value)
