"""Named bound families per source model.

Each ``BoundSpec`` knows how to produce a rate bound at (n, d, eps) and how
to answer the fixed-rate question "is (n, d, eps) feasible at log M?",
which is what distortion bounds are bisected on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import bounds_bes as bes
from . import bounds_binary as bb
from . import bounds_dms as bd
from . import bounds_gms as bg
from .errors import DomainError
from .numerics import LN2
from .solver import (BoundValue, DistortionBound, _integer_log_m, distortion_from_bound,
                     rate_from_eps_bound)
from .sources import BES, BMS, DMS, GMS, d_range


@dataclass(frozen=True)
class BoundSpec:
    name: str
    kind: str
    rate: Callable[..., BoundValue]          # (n, d, eps, integer=False)
    feasible: Callable[..., bool]            # (n, d, eps, log_m)


def _eps_form(name, kind, fn, log_alphabet, hi_fn=None):
    def rate(n, d, eps, integer=False):
        hi = hi_fn(n, d) if hi_fn else None
        return rate_from_eps_bound(lambda lm: fn(n, d, lm), n, eps, kind, name,
                                   log_alphabet=log_alphabet, hi=hi, integer=integer)

    def feasible(n, d, eps, log_m):
        return fn(n, d, log_m) <= eps

    return BoundSpec(name, kind, rate, feasible)


def _direct_form(name, kind, fn, diag=None):
    def rate(n, d, eps, integer=False):
        out = fn(n, d, eps)
        extra = {}
        if isinstance(out, tuple):
            out, extra = out[0], dict(diag(out) if diag else {})
        log_m = _integer_log_m(out, kind) if integer else out
        return BoundValue(kind, name, log_m, n, extra)

    def feasible(n, d, eps, log_m):
        out = fn(n, d, eps)
        return (out[0] if isinstance(out, tuple) else out) <= log_m

    return BoundSpec(name, kind, rate, feasible)


def _approx(name, fn):
    def rate(n, d, eps, integer=False):
        return BoundValue("approximation", name, fn(n, d, eps) * n * LN2, n)

    def feasible(n, d, eps, log_m):
        return fn(n, d, eps) * n * LN2 <= log_m

    return BoundSpec(name, "approximation", rate, feasible)


def default_remainder(source) -> str:
    if isinstance(source, (GMS, BES)):
        return "half_log_n"
    return "auto"


def bound_families(source, remainder: str | None = None) -> dict[str, BoundSpec]:
    rem = remainder or default_remainder(source)
    fams: list[BoundSpec] = []
    if isinstance(source, BMS):
        p = source.p
        if source.equiprobable:
            fams += [
                _direct_form("ebms-converse", "converse", bb.ebms_converse_logm),
                _eps_form("ebms-ach", "achievability", bb.ebms_achievability, LN2),
            ]
        fams += [
            _eps_form("tilted-converse", "converse",
                      lambda n, d, lm: bb.bms_converse_tilted(p, n, d, lm), LN2),
            _direct_form("ht-converse", "converse",
                         lambda n, d, e: bb.bms_converse_ht(p, n, d, e)),
            _eps_form("ach", "achievability",
                      lambda n, d, lm: bb.bms_achievability(p, n, d, lm), LN2),
            _eps_form("cc-ach", "achievability",
                      lambda n, d, lm: bb.bms_achievability_cc(p, n, d, lm), LN2),
            _direct_form("shannon-ach", "achievability",
                         lambda n, d, e: bb.bms_shannon_logm(p, n, d, e),
                         diag=lambda out: {"d_test": out[1]}),
            _approx("approx", lambda n, d, e: bb.binary_gaussian_approx(p, n, d, e, rem)),
        ]
    elif isinstance(source, DMS):
        pmf, m = source.pmf, source.m
        if source.equiprobable:
            fams += [
                _eps_form("edms-converse", "converse",
                          lambda n, d, lm: bd.edms_converse(n, d, lm, m), math.log(m)),
                _eps_form("edms-ach", "achievability",
                          lambda n, d, lm: bd.edms_achievability(n, d, lm, m), math.log(m)),
            ]
        fams += [
            _eps_form("tilted-converse", "converse",
                      lambda n, d, lm: bd.dms_converse_tilted(pmf, n, d, lm), math.log(m)),
            _direct_form("ht-converse", "converse",
                         lambda n, d, e: bd.dms_converse_ht(pmf, n, d, e)),
            _eps_form("cc-ach", "achievability",
                      lambda n, d, lm: bd.dms_achievability_cc(pmf, n, d, lm), math.log(m)),
            _approx("approx", lambda n, d, e: bd.dms_gaussian_approx(pmf, n, d, e, rem)),
        ]
    elif isinstance(source, BES):
        delta = source.delta
        fams += [
            _eps_form("converse", "converse",
                      lambda n, d, lm: bes.bes_converse(delta, n, d, lm), LN2),
            _eps_form("ach", "achievability",
                      lambda n, d, lm: bes.bes_achievability(delta, n, d, lm), LN2),
            _approx("approx", lambda n, d, e: bes.bes_gaussian_approx(delta, n, d, e, rem)),
        ]
    elif isinstance(source, GMS):
        s2 = source.sigma2

        def hi(n, d):
            return n * (0.5 * math.log(s2 / d) + 3.0) + 64.0

        fams += [
            _eps_form("tilted-converse", "converse",
                      lambda n, d, lm: bg.gms_converse_tilted(s2, n, d, lm), 0.0, hi),
            _direct_form("volume-converse", "converse",
                         lambda n, d, e: bg.gms_converse_volume(s2, n, d, e)),
            _eps_form("cap-ach", "achievability",
                      lambda n, d, lm: bg.gms_achievability_cap(s2, n, d, lm), 0.0, hi),
            _direct_form("covering-ach", "achievability",
                         lambda n, d, e: bg.gms_achievability_covering(s2, n, d, e)),
            _approx("approx", lambda n, d, e: bg.gms_gaussian_approx(s2, n, d, e, rem)),
        ]
    else:
        raise DomainError(f"unknown source {source!r}")
    return {f.name: f for f in fams}


def get_bound(source, name: str, remainder: str | None = None) -> BoundSpec:
    fams = bound_families(source, remainder)
    if name not in fams:
        raise DomainError(f"unknown bound {name!r} for {type(source).__name__}; "
                          f"choose from {sorted(fams)}")
    return fams[name]


def gaussian_approx(source, n: int, d, eps: float, remainder: str | None = None) -> float:
    """Gaussian approximation of the minimal rate in bits per symbol,
    dispatched to the per-source formula."""
    rem = remainder or default_remainder(source)
    if isinstance(source, BMS):
        return bb.binary_gaussian_approx(source.p, n, d, eps, rem)
    if isinstance(source, DMS):
        return bd.dms_gaussian_approx(source.pmf, n, d, eps, rem)
    if isinstance(source, BES):
        return bes.bes_gaussian_approx(source.delta, n, d, eps, rem)
    if isinstance(source, GMS):
        return bg.gms_gaussian_approx(source.sigma2, n, d, eps, rem)
    raise DomainError(f"unknown source {source!r}")


def log_alphabet(source) -> float | None:
    if isinstance(source, (BMS, BES)):
        return LN2
    if isinstance(source, DMS):
        return math.log(source.m)
    return None


def distortion_bound(source, spec: BoundSpec, n: int, rate_nats: float, eps: float,
                     tol: float = 1e-10) -> DistortionBound:
    """Bound on D*(n, R, eps) from one family, R in nats per symbol."""
    la = log_alphabet(source)
    if la is not None and rate_nats >= la:
        return DistortionBound(spec.kind, spec.name, 0.0)
    lo, hi = d_range(source)
    if isinstance(source, BES):
        hi = min(hi, 1 - source.delta / 2)
    span = hi - lo
    lo, hi = lo + 1e-9 * span, hi - 1e-9 * span
    log_m = n * rate_nats

    def feasible(d):
        try:
            return spec.feasible(n, d, eps, log_m)
        except DomainError:
            return False

    return distortion_from_bound(feasible, lo, hi, spec.kind, spec.name, tol)
