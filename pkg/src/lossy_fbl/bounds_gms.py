"""Bounds for the Gaussian memoryless source N(0, sigma2) under mean-square
error.

The normalised energy Z = |X^n|^2 / sigma2 is chi-square with n degrees of
freedom, and every bound here reduces to a one-dimensional statement
about Z.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import optimize

from .bounds_core import log_miss_power
from .errors import DomainError
from .numerics import (LN2, chi2_cdf, chi2_isf, chi2_logpdf, chi2_sf, integrate,
                       maximize_1d)
from .sources import GMS, gaussian_approx_nats

# third-branch constant of the covering-density formula, 7^{4 ln 7 / 7} / 4
COVERING_CONST_MID = 7.0 ** (4.0 * math.log(7.0) / 7.0) / 4.0


def _check(sigma2, d):
    GMS(sigma2)
    if not (0 < d < sigma2):
        raise DomainError(f"GMS bounds need 0 < d < sigma2 = {sigma2}, got d={d}")


@lru_cache(maxsize=1024)
def radius_sq(n: int, eps: float) -> float:
    """r_n(eps)^2, defined by n r^2 = (1 - eps)-quantile of chi-square_n."""
    if not (0 < eps < 1):
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    return chi2_isf(n, eps) / n


# --------------------------------------------------------------------------
# converses
# --------------------------------------------------------------------------

def gms_converse_tilted(sigma2: float, n: int, d: float, log_m: float) -> float:
    """sup_{g >= 0} P[Z >= n + 2(log M + g) - n ln(sigma2/d)] - e^{-g}."""
    _check(sigma2, d)
    if log_m == math.inf:
        return 0.0
    shift = n + 2.0 * log_m - n * math.log(sigma2 / d)

    def objective(g):
        return chi2_sf(n, shift + 2.0 * g) - math.exp(-g)

    # beyond g_hi the survival term is below e^{-40}
    g_hi = max(1.0, (chi2_isf(n, 1e-17) - shift) / 2.0 + 1.0)
    _, best = maximize_1d(objective, 0.0, g_hi, tol=1e-10)
    return float(min(1.0, max(0.0, best, objective(0.0))))


def gms_converse_volume(sigma2: float, n: int, d: float, eps: float) -> float:
    """log M >= n ln(sigma r_n(eps) / sqrt(d))."""
    _check(sigma2, d)
    return 0.5 * n * math.log(sigma2 * radius_sq(n, eps) / d)


# --------------------------------------------------------------------------
# spherical-cap achievability
# --------------------------------------------------------------------------

def _cap_geometry(sigma2, d):
    D = d / sigma2
    a = math.sqrt(1 - D) - math.sqrt(D)
    b = math.sqrt(1 - D) + math.sqrt(D)
    return D, a * a, b * b


def log_cap_fraction(n: int, D: float, z, prefactor: str = "geometric"):
    """ln rho(n, z): lower bound on the fraction of the sphere of radius
    sqrt(n sigma2 (1 - D)) within distance sqrt(n d) of a point at squared
    normalised radius z, from the disc the cap projects onto.
    -inf outside [a^2, b^2].

    ``geometric`` uses the disc-to-sphere area ratio
    Gamma(n/2+1) / (n sqrt(pi) Gamma((n+1)/2)) sin^{n-1}(theta).
    ``printed`` replaces n sqrt(pi) by sqrt(pi n); that is larger by
    sqrt(n) and is not a lower bound, so it is kept for comparison only.
    """
    z = np.asarray(z, dtype=float)
    if prefactor == "geometric":
        norm = math.log(n) + 0.5 * math.log(math.pi)
    elif prefactor == "printed":
        norm = 0.5 * math.log(math.pi * n)
    else:
        raise DomainError(f"prefactor must be 'geometric' or 'printed', got {prefactor!r}")
    const = math.lgamma(n / 2 + 1) - norm - math.lgamma((n - 1) / 2 + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = 1.0 - (1.0 + z - 2.0 * D) ** 2 / (4.0 * (1.0 - D) * z)
        out = const + 0.5 * (n - 1) * np.log(np.clip(inner, 0.0, None))
    return np.where((inner > 0) & (z > 0), out, -np.inf)


def gms_achievability_cap(sigma2: float, n: int, d: float, log_m: float,
                          prefactor: str = "geometric") -> float:
    """eps <= E[(1 - rho(n, Z/n))^M], Z chi-square_n, with rho = 0 outside
    [a^2, b^2]."""
    _check(sigma2, d)
    if n < 2:
        raise DomainError("cap bound needs n >= 2")
    D, a2, b2 = _cap_geometry(sigma2, d)
    if log_m == -math.inf:
        return 1.0
    outside = chi2_cdf(n, n * a2) + chi2_sf(n, n * b2)
    # the chi-square_n / n density is negligible beyond this window;
    # whatever mass is cut off is counted as uncovered
    half = 40.0 * math.sqrt(2.0 / n) + 40.0 / n
    lo, hi = max(a2, 1.0 - half), min(b2, 1.0 + half)
    dropped = 0.0
    if lo > a2:
        dropped += chi2_cdf(n, n * lo) - chi2_cdf(n, n * a2)
    if hi < b2:
        dropped += chi2_cdf(n, n * b2) - chi2_cdf(n, n * hi)
    if not lo < hi:
        return min(1.0, outside + max(0.0, dropped))

    def integrand(z):
        log_miss = float(log_miss_power(log_cap_fraction(n, D, z, prefactor), log_m))
        return n * math.exp(chi2_logpdf(n, n * z) + log_miss)

    # where M rho crosses 1 the integrand switches from ~0 to the density
    zpk = abs(1.0 - 2.0 * D)
    points = [1.0, zpk]

    def crossing(z):
        return float(log_cap_fraction(n, D, z, prefactor)) + log_m

    for end in (lo, hi):
        lo_b, hi_b = sorted((zpk, end))
        try:
            if crossing(zpk) > 0 and crossing(end) < 0:
                points.append(optimize.brentq(crossing, lo_b, hi_b, xtol=1e-14))
        except ValueError:
            pass
    inner = integrate(integrand, lo, hi, abs_tol=1e-13, rel_tol=1e-10, points=points)
    return min(1.0, outside + max(0.0, dropped) + inner)


# --------------------------------------------------------------------------
# covering achievability
# --------------------------------------------------------------------------

def covering_count(r: float, n: int) -> float:
    """ln of the number of unit balls sufficient to cover a ball of radius r
    in R^n (four-branch formula, natural logs)."""
    if n < 2:
        raise DomainError("covering count needs n >= 2")
    if not r > 1:
        raise DomainError(f"covering count needs radius ratio r > 1, got {r}")
    ln_n = math.log(n)
    lnln_n = math.log(ln_n)
    n_ln_r = n * math.log(r)
    if r >= n:
        return 1.0 + math.log(n * ln_n + n * lnln_n + 5 * n) + n_ln_r
    if r >= n / ln_n:
        return ln_n + math.log(n * ln_n + n * lnln_n + 5 * n) + n_ln_r
    if ln_n <= 2.0 or math.pi * n <= 4.0:
        raise DomainError(f"covering count is vacuous for n={n} at r={r} (needs ln n > 2)")
    bracket = ((n - 1) * math.log(r * n) + (n - 1) * lnln_n + 0.5 * ln_n
               + math.log(math.pi * math.sqrt(2 * n) / math.sqrt(math.pi * n - 2)))
    if bracket <= 0:
        raise DomainError(f"covering count bracket nonpositive for n={n}, r={r}")
    common = (0.5 * math.log(2 * math.pi) + math.log(bracket) - math.log(r)
              - math.log1p(-2.0 / ln_n) - math.log1p(-2.0 / math.sqrt(math.pi * n)) + n_ln_r)
    if r > 2:
        return math.log(COVERING_CONST_MID) + 1.5 * ln_n - 2.0 * math.log(ln_n) + common
    return 0.5 * ln_n + common


def gms_achievability_covering(sigma2: float, n: int, d: float, eps: float) -> float:
    """log M <= ln M(sigma r_n(eps) / sqrt(d)): cover the ball holding
    1 - eps of the source mass."""
    _check(sigma2, d)
    ratio = math.sqrt(sigma2 * radius_sq(n, eps) / d)
    if ratio <= 1:
        raise DomainError(f"covering bound vacuous: radius ratio {ratio} <= 1")
    return covering_count(ratio, n)


def gms_gaussian_approx(sigma2: float, n: int, d: float, eps: float,
                        remainder: str = "half_log_n") -> float:
    """Gaussian approximation in bits per symbol (V = 1/2 nats^2)."""
    _check(sigma2, d)
    return gaussian_approx_nats(0.5 * math.log(sigma2 / d), 0.5, n, eps, remainder) / LN2
