"""Source models, rate-distortion functions, d-tilted information and
dispersion.

Four concrete models are supported, each with its natural distortion
measure: binary memoryless (bit error rate), discrete memoryless (symbol
error rate), binary erased (bit error rate against the pre-erasure bits)
and Gaussian memoryless (mean-square error).  All information quantities
are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numerics import LN2, binary_entropy, bisect_decreasing, q_inv


@dataclass(frozen=True)
class BMS:
    """Binary memoryless source with P[X = 1] = p <= 1/2."""

    p: float

    def __post_init__(self):
        if not (0.0 < self.p <= 0.5):
            raise DomainError(f"BMS needs 0 < p <= 1/2, got p={self.p}")

    @property
    def equiprobable(self) -> bool:
        return self.p == 0.5

    @property
    def alphabet_size(self) -> int:
        return 2

    def as_dms(self) -> "DMS":
        return DMS((1.0 - self.p, self.p))


@dataclass(frozen=True)
class DMS:
    """Discrete memoryless source; pmf sorted nonincreasing."""

    pmf: tuple

    def __post_init__(self):
        pmf = tuple(float(x) for x in self.pmf)
        object.__setattr__(self, "pmf", pmf)
        if len(pmf) < 2:
            raise DomainError("DMS needs at least two letters")
        if any(x <= 0 for x in pmf):
            raise DomainError("DMS pmf must be strictly positive")
        if abs(sum(pmf) - 1.0) > 1e-12:
            raise DomainError(f"DMS pmf must sum to 1 (sum={sum(pmf)!r})")
        if any(pmf[i] < pmf[i + 1] for i in range(len(pmf) - 1)):
            raise DomainError("DMS pmf must be sorted nonincreasing")

    @property
    def m(self) -> int:
        return len(self.pmf)

    @property
    def alphabet_size(self) -> int:
        return self.m

    @property
    def equiprobable(self) -> bool:
        return max(self.pmf) - min(self.pmf) <= 1e-15

    def entropy(self) -> float:
        p = np.array(self.pmf)
        return float(-(p * np.log(p)).sum())

    def varentropy(self) -> float:
        p = np.array(self.pmf)
        iota = -np.log(p)
        mean = (p * iota).sum()
        return float((p * (iota - mean) ** 2).sum())


@dataclass(frozen=True)
class BES:
    """Equiprobable binary source seen through an erasure channel with
    erasure rate delta."""

    delta: float

    # working range of the bounds is delta/2 < d < 1 - delta/2
    def __post_init__(self):
        if not (0.0 <= self.delta < 1.0):
            raise DomainError(f"BES needs 0 <= delta < 1, got delta={self.delta}")

    @property
    def alphabet_size(self) -> int:
        return 2

    @property
    def bound_range(self):
        return self.delta / 2, 1.0 - self.delta / 2


@dataclass(frozen=True)
class GMS:
    """Gaussian memoryless source N(0, sigma2)."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError(f"GMS needs sigma2 > 0, got {self.sigma2}")


SourceModel = BMS | DMS | BES | GMS


@dataclass(frozen=True)
class WaterLevel:
    eta: float
    m_eta: int
    p_y: np.ndarray = field(repr=False)
    p_x_given_y: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class RdPoint:
    d: float
    rate_nats: float
    lambda_star: float
    V_nats2: float
    eta: float | None = None
    m_eta: int | None = None


@dataclass(frozen=True)
class TiltedInfoDist:
    """Single-letter law of the d-tilted information, as merged atoms."""

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_atoms(cls, atoms, merge_tol: float = 1e-12) -> "TiltedInfoDist":
        atoms = sorted((float(v), float(p)) for v, p in atoms if p > 0)
        vals, probs = [], []
        for v, p in atoms:
            if vals and abs(v - vals[-1]) <= merge_tol * max(1.0, abs(v)):
                probs[-1] += p
            else:
                vals.append(v)
                probs.append(p)
        return cls(np.array(vals), np.array(probs))

    @property
    def atoms(self):
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def mean(self) -> float:
        return float((self.values * self.probs).sum())

    def var(self) -> float:
        mu = self.mean()
        return float((self.probs * (self.values - mu) ** 2).sum())

    def third_abs_moment(self) -> float:
        mu = self.mean()
        return float((self.probs * np.abs(self.values - mu) ** 3).sum())


# --------------------------------------------------------------------------
# ranges and rate-distortion functions
# --------------------------------------------------------------------------

def d_range(source) -> tuple[float, float]:
    """(d_min, d_max): the open interval of nontrivial distortion levels."""
    if isinstance(source, BMS):
        return 0.0, source.p
    if isinstance(source, DMS):
        return 0.0, 1.0 - source.pmf[0]
    if isinstance(source, BES):
        return source.delta / 2, 0.5
    if isinstance(source, GMS):
        return 0.0, source.sigma2
    raise DomainError(f"unknown source {source!r}")


def _check_interior(source, d, allow_zero=False):
    lo, hi = d_range(source)
    if allow_zero and d == lo == 0.0:
        return
    if not (lo < d < hi):
        raise DomainError(f"d={d} outside the interior ({lo}, {hi}) for {source!r}")


def dms_water_level(pmf, d: float) -> WaterLevel:
    """Reverse water-filling solution (eta, m_eta) and the rate-distortion
    achieving output / backward-channel distributions."""
    pmf = np.asarray(pmf, dtype=float)
    m = len(pmf)
    if not (0.0 < d < 1.0 - pmf[0]):
        raise DomainError(f"water level needs 0 < d < 1 - P(1) = {1 - pmf[0]}, got {d}")
    tail = 0.0
    found = None
    for m_eta in range(m, 1, -1):
        if m_eta < m:
            tail += pmf[m_eta]
        eta = (d - tail) / (m_eta - 1)
        nxt = pmf[m_eta] if m_eta < m else 0.0
        if eta >= 0 and pmf[m_eta - 1] > eta >= nxt - 1e-15:
            found = (eta, m_eta)
            break
    if found is None:
        raise RuntimeError(f"no consistent water level for pmf={pmf.tolist()}, d={d}")
    eta, m_eta = found
    p_y = np.zeros(m)
    p_y[:m_eta] = (pmf[:m_eta] - eta) / (1.0 - d - eta)
    pxy = np.zeros((m, m))
    for b in range(m_eta):
        pxy[:m_eta, b] = eta
        pxy[b, b] = 1.0 - d
        pxy[m_eta:, b] = pmf[m_eta:]
    return WaterLevel(eta, m_eta, p_y, pxy)


def rate_distortion(source, d: float) -> float:
    """R(d) in nats; zero for d at or above d_max."""
    lo, hi = d_range(source)
    if isinstance(source, GMS):
        if d <= 0:
            raise DomainError("GMS rate-distortion needs d > 0")
        return 0.5 * math.log(source.sigma2 / d) if d < hi else 0.0
    if d >= hi:
        return 0.0
    if isinstance(source, BMS):
        if d < 0:
            raise DomainError(f"d must be nonnegative, got {d}")
        return binary_entropy(source.p) - binary_entropy(d)
    if isinstance(source, DMS):
        if d < 0:
            raise DomainError(f"d must be nonnegative, got {d}")
        if d == 0:
            return source.entropy()
        wl = dms_water_level(source.pmf, d)
        p = np.array(source.pmf[: wl.m_eta])
        rate = float(-(p * np.log(p)).sum()) + (1 - d) * math.log(1 - d)
        if wl.eta > 0:
            rate += (wl.m_eta - 1) * wl.eta * math.log(wl.eta)
        return rate
    if isinstance(source, BES):
        if d < lo:
            raise DomainError(f"BES rate-distortion needs d >= delta/2 = {lo}, got {d}")
        x = (d - lo) / (1.0 - source.delta)
        return (1.0 - source.delta) * (LN2 - binary_entropy(x))
    raise DomainError(f"unknown source {source!r}")


def lambda_star(source, d: float) -> float:
    """-R'(d), in nats per unit distortion."""
    _check_interior(source, d)
    if isinstance(source, BMS):
        return math.log((1 - d) / d)
    if isinstance(source, DMS):
        wl = dms_water_level(source.pmf, d)
        return math.log((1 - d) / wl.eta)
    if isinstance(source, BES):
        half = source.delta / 2
        return math.log((1 - half - d) / (d - half))
    if isinstance(source, GMS):
        return 1.0 / (2.0 * d)
    raise DomainError(f"unknown source {source!r}")


def tilted_info_dist(source, d: float) -> TiltedInfoDist:
    """Per-letter distribution of the d-tilted information j(X, d)."""
    if isinstance(source, GMS):
        raise DomainError("GMS tilted information is continuous; use the chi-square form")
    if isinstance(source, BMS):
        if not (0.0 <= d < source.p):
            raise DomainError(f"BMS tilted information needs 0 <= d < p, got {d}")
        h = binary_entropy(d)
        p = source.p
        return TiltedInfoDist.from_atoms([(-math.log(p) - h, p), (-math.log1p(-p) - h, 1 - p)])
    if isinstance(source, DMS):
        pmf = np.array(source.pmf)
        if d == 0:
            return TiltedInfoDist.from_atoms(zip(-np.log(pmf), pmf))
        _check_interior(source, d)
        wl = dms_water_level(pmf, d)
        base = (1 - d) * math.log(1 - d) + d * math.log(wl.eta)
        vals = base + np.minimum(-np.log(pmf), -math.log(wl.eta))
        return TiltedInfoDist.from_atoms(zip(vals, pmf))
    if isinstance(source, BES):
        lo, hi = source.bound_range
        if not (lo < d < hi):
            raise DomainError(f"BES tilted information needs {lo} < d < {hi}, got {d}")
        lam = lambda_star(source, d) if d < 0.5 else 0.0
        delta = source.delta
        nonerased = LN2 - math.log1p(math.exp(-lam))
        return TiltedInfoDist.from_atoms(
            [(nonerased - lam * d, 1 - delta), (lam - lam * d, delta / 2), (-lam * d, delta / 2)]
        )
    raise DomainError(f"unknown source {source!r}")


def dispersion(source, d: float) -> float:
    """Rate dispersion V(d) in nats^2."""
    if isinstance(source, GMS):
        _check_interior(source, d)
        return 0.5
    if isinstance(source, BMS):
        if not (0.0 <= d < source.p):
            raise DomainError(f"BMS dispersion needs 0 <= d < p, got {d}")
        p = source.p
        return p * (1 - p) * math.log((1 - p) / p) ** 2
    if isinstance(source, DMS):
        return tilted_info_dist(source, d).var()
    if isinstance(source, BES):
        _check_interior(source, d)
        lam = lambda_star(source, d)
        delta = source.delta
        return delta * (1 - delta) * math.log(math.cosh(lam / 2)) ** 2 + delta * lam ** 2 / 4
    raise DomainError(f"unknown source {source!r}")


def rd_point(source, d: float) -> RdPoint:
    eta = m_eta = None
    if isinstance(source, DMS):
        wl = dms_water_level(source.pmf, d)
        eta, m_eta = wl.eta, wl.m_eta
    return RdPoint(d, rate_distortion(source, d), lambda_star(source, d),
                   dispersion(source, d), eta, m_eta)


# --------------------------------------------------------------------------
# distortion-rate side
# --------------------------------------------------------------------------

def _rate_range(source):
    lo, hi = d_range(source)
    if isinstance(source, GMS):
        return 0.0, math.inf
    return 0.0, rate_distortion(source, lo)


def distortion_rate(source, R: float, tol: float = 1e-13) -> float:
    """D(R), the inverse of R(d) on the interior."""
    rmin, rmax = _rate_range(source)
    if not (rmin < R < rmax):
        raise DomainError(f"rate R={R} nats outside ({rmin}, {rmax}) for {source!r}")
    if isinstance(source, GMS):
        return source.sigma2 * math.exp(-2.0 * R)
    lo, hi = d_range(source)
    a, b = bisect_decreasing(lambda d: rate_distortion(source, d), R, lo, hi, tol=tol)
    return 0.5 * (a + b)


def distortion_dispersion(source, R: float) -> float:
    """(D'(R))^2 V(D(R)), using D'(R) = -1 / lambda*(D(R))."""
    d = distortion_rate(source, R)
    return dispersion(source, d) / lambda_star(source, d) ** 2


@dataclass(frozen=True)
class BlocklengthPlan:
    n: float
    source_factor: float
    spec_factor: float
    zero_dispersion: bool


def required_blocklength(source, mode: str, value: float, eta: float, eps: float) -> BlocklengthPlan:
    """Blocklength needed to operate at (1+eta) times the asymptotic limit
    with excess probability eps, from the Gaussian approximation.

    ``mode`` is "rate" (value is d) or "distortion" (value is R in nats).
    """
    if eta <= 0:
        raise DomainError("relative excess eta must be positive")
    spec = (q_inv(eps) / eta) ** 2
    if mode == "rate":
        V = dispersion(source, value)
        Rd = rate_distortion(source, value)
        factor = V / Rd ** 2
    elif mode == "distortion":
        d = distortion_rate(source, value)
        factor = distortion_dispersion(source, value) / d ** 2
        V = factor
    else:
        raise DomainError(f"mode must be 'rate' or 'distortion', got {mode!r}")
    zero = V == 0.0
    return BlocklengthPlan(0.0 if zero else factor * spec, factor, spec, zero)


# --------------------------------------------------------------------------
# Gaussian approximation
# --------------------------------------------------------------------------

REMAINDER_MODES = ("zero", "half_log_n", "minus_half_log_n", "envelope", "zero_dispersion")


def remainder_term(mode: str, n: int, eps: float | None = None, log_coeff: float = 0.5) -> float:
    """The (log n)/n-order correction added to R(d) + sqrt(V/n) Q^{-1}(eps), in nats.

    ``envelope`` is log_coeff * ln(n)/n + ln(ln(n))/n; ``zero_dispersion``
    is -(1/n) ln(1/(1-eps)).
    """
    ln_n = math.log(n)
    if mode == "zero":
        return 0.0
    if mode == "half_log_n":
        return 0.5 * ln_n / n
    if mode == "minus_half_log_n":
        return -0.5 * ln_n / n
    if mode == "envelope":
        lnln = math.log(ln_n) if n > 1 else 0.0
        return (log_coeff * ln_n + lnln) / n
    if mode == "zero_dispersion":
        if eps is None:
            raise DomainError("zero_dispersion remainder needs eps")
        return math.log1p(-eps) / n
    raise DomainError(f"unknown remainder mode {mode!r}; choose from {REMAINDER_MODES}")


def gaussian_approx_nats(R: float, V: float, n: int, eps: float, remainder: str = "zero",
                         log_coeff: float = 0.5) -> float:
    """R + sqrt(V/n) Q^{-1}(eps) + theta, all in nats."""
    if n < 1:
        raise DomainError("blocklength must be >= 1")
    return R + math.sqrt(V / n) * q_inv(eps) + remainder_term(remainder, n, eps, log_coeff)
