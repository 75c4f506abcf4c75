"""Oracle checks shared by the ``verify`` subcommand and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bounds_binary import ebms_achievability
from .bounds_dms import edms_achievability
from .errors import LossyFBLError
from .families import bound_families
from .oracle import brute_force_Mstar, mc_random_coding
from .sources import BMS


@dataclass(frozen=True)
class BracketCase:
    n: int
    p: float
    d: Fraction
    eps: float


BRACKET_CASES = tuple(BracketCase(n, p, d, eps)
                      for n in (1, 2, 3, 4) for p in (0.3, 0.5)
                      for d in (Fraction(0), Fraction(1, 4)) for eps in (0.05, 0.2))


def bracket_check(case: BracketCase):
    """Every computable bound must bracket ln M*: converse <= ln M* <= achievability.

    Achievability rates are rounded up to an integer M.  Returns
    (ok, ln M*, {bound: (kind, log M)}, {bound: error}).
    """
    m_star = brute_force_Mstar(case.p, case.n, case.d, case.eps)
    target = math.log(m_star)
    values, skipped = {}, {}
    ok = True
    for name, spec in bound_families(BMS(case.p)).items():
        if spec.kind == "approximation":
            continue
        try:
            bv = spec.rate(case.n, case.d, case.eps, integer=spec.kind == "achievability")
        except LossyFBLError as err:
            skipped[name] = str(err)
            continue
        values[name] = (bv.kind, bv.log_M_nats)
        if bv.kind == "converse" and bv.log_M_nats > target + 1e-9:
            ok = False
        if bv.kind == "achievability" and bv.log_M_nats < target - 1e-9:
            ok = False
    return ok, target, values, skipped


@dataclass(frozen=True)
class MCCase:
    m: int
    n: int
    d: Fraction
    M: int

    def closed_form(self) -> float:
        if self.m == 2:
            return ebms_achievability(self.n, self.d, math.log(self.M))
        return edms_achievability(self.n, self.d, math.log(self.M), self.m)


MC_CASES = (
    MCCase(2, 8, Fraction(1, 8), 4),
    MCCase(2, 10, Fraction(1, 5), 8),
    MCCase(2, 6, Fraction(1, 6), 3),
    MCCase(3, 5, Fraction(1, 5), 6),
    MCCase(3, 8, Fraction(1, 4), 10),
    MCCase(4, 6, Fraction(1, 3), 12),
)


def mc_check(case: MCCase, trials: int, seed: int = 0, threads: int = 1):
    """(ok, eps_hat, stderr, closed form): Monte Carlo within 3 standard errors."""
    eps_hat, se = mc_random_coding([1.0 / case.m] * case.m, case.n, case.M, case.d, trials,
                                   seed=seed, threads=threads)
    target = case.closed_form()
    return abs(eps_hat - target) <= 3 * se, eps_hat, se, target


def run_all(trials: int = 10**5, seed: int = 0, threads: int = 1, stream=None) -> bool:
    def say(msg):
        if stream is not None:
            print(msg, file=stream)

    all_ok = True
    for case in BRACKET_CASES:
        ok, target, values, _ = bracket_check(case)
        all_ok &= ok
        say(f"{'PASS' if ok else 'FAIL'} bracket n={case.n} p={case.p} d={case.d} "
            f"eps={case.eps}: ln M*={target:.6g}, {len(values)} bounds")
    for case in MC_CASES:
        ok, eps_hat, se, target = mc_check(case, trials, seed, threads)
        all_ok &= ok
        say(f"{'PASS' if ok else 'FAIL'} random coding m={case.m} n={case.n} d={case.d} "
            f"M={case.M}: {eps_hat:.6f} +- {se:.2g} vs {target:.6f}")
    return all_ok
