import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lossy_fbl import BES, dispersion, get_bound, rate_distortion
from lossy_fbl.bounds_bes import bes_achievability, bes_converse, bes_gaussian_approx, bes_tables
from lossy_fbl.bounds_binary import ebms_achievability, ebms_converse
from lossy_fbl.errors import ConvergenceError, DomainError
from lossy_fbl.numerics import q_inv

LN2 = math.log(2)


def _exact_double_sum(delta, n, d, M, achievability):
    # the (k, j) average in exact rational arithmetic
    delta = Fraction(delta)
    D = math.floor(Fraction(n) * Fraction(d))
    total = Fraction(0)
    for k in range(n + 1):
        wk = math.comb(n, k) * delta ** k * (1 - delta) ** (n - k)
        for j in range(k + 1):
            w = wk * Fraction(math.comb(k, j), 2 ** k)
            r = D - j
            ball = 0 if r < 0 else sum(math.comb(n - k, i) for i in range(min(r, n - k) + 1))
            frac = Fraction(ball, 2 ** (n - k))
            term = (1 - frac) ** M if achievability else max(Fraction(0), 1 - M * frac)
            total += w * term
    return float(total)


@pytest.mark.parametrize("n,d,M", [(1, 0.3, 1), (3, 0.3, 2), (5, 0.25, 3), (8, 0.2, 5),
                                   (8, 0.45, 2)])
def test_double_sum_against_rational_oracle(n, d, M):
    delta = 0.25
    assert bes_converse(delta, n, d, math.log(M)) == pytest.approx(
        _exact_double_sum(delta, n, d, M, False), abs=1e-13)
    assert bes_achievability(delta, n, d, math.log(M)) == pytest.approx(
        _exact_double_sum(delta, n, d, M, True), abs=1e-13)


@given(st.integers(1, 300), st.floats(0.0, 0.9))
def test_weights_normalised(n, delta):
    log_w, _ = bes_tables(delta, n, 0.5)
    assert np.exp(log_w).sum() == pytest.approx(1.0, abs=1e-9)


def test_erased_mismatches_beyond_radius_leave_empty_ball():
    n, d = 20, 0.1
    _, log_b = bes_tables(0.1, n, d)
    D = math.floor(n * d + 1e-9)
    js = np.concatenate([np.arange(k + 1) for k in range(n + 1)])
    assert np.all(log_b[js > D] == -np.inf)
    assert np.all(np.isfinite(log_b[js <= D]))


@given(st.integers(1, 200), st.floats(0.01, 0.49), st.floats(-3, 150))
def test_no_erasures_reduces_to_equiprobable(n, d, log_m):
    assert bes_converse(0.0, n, d, log_m) == pytest.approx(ebms_converse(n, d, log_m), abs=1e-12)
    assert bes_achievability(0.0, n, d, log_m) == pytest.approx(
        ebms_achievability(n, d, log_m), abs=1e-12)


@given(st.integers(1, 80), st.floats(0.06, 0.94), st.lists(st.floats(-3, 60), min_size=2,
                                                          max_size=6))
def test_range_and_monotone(n, d, grid):
    grid = sorted(grid)
    for fn in (bes_converse, bes_achievability):
        vals = [fn(0.1, n, d, g) for g in grid]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))
    # with unlimited codewords only erased mismatches beyond the radius remain
    log_w, log_b = bes_tables(0.1, n, d)
    floor = float(np.exp(log_w[log_b == -np.inf]).sum())
    assert bes_converse(0.1, n, d, math.inf) == pytest.approx(floor, abs=1e-12)


def test_domain():
    with pytest.raises(DomainError):
        bes_converse(0.1, 10, 0.04, 1.0)
    with pytest.raises(DomainError):
        bes_achievability(0.1, 10, 0.96, 1.0)


@pytest.mark.parametrize("n,d,eps", [(50, 0.1, 0.1), (100, 0.2, 0.01), (200, 0.3, 0.1)])
def test_bes_sandwich(n, d, eps):
    src = BES(0.1)
    conv = get_bound(src, "converse").rate(n, d, eps).log_M_nats
    ach = get_bound(src, "ach").rate(n, d, eps).log_M_nats
    assert conv <= ach


def test_approx_formula():
    n, d, eps = 500, 0.1, 0.1
    src = BES(0.1)
    R, V = rate_distortion(src, d), dispersion(src, d)
    expect = (R + math.sqrt(V / n) * q_inv(eps) + 0.5 * math.log(n) / n) / LN2
    assert bes_gaussian_approx(0.1, n, d, eps, "half_log_n") == pytest.approx(expect, rel=1e-14)


def test_unreachable_eps_gives_infinite_converse():
    # P[J > floor(nd)] exceeds eps, so no code of any size meets it
    src = BES(0.1)
    conv = get_bound(src, "converse").rate(150, 0.07, 0.01)
    assert conv.log_M_nats == math.inf and conv.diagnostics["infeasible"]
    with pytest.raises(ConvergenceError):
        get_bound(src, "ach").rate(150, 0.07, 0.01)
