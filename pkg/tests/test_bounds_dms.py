import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from lossy_fbl import DMS, dispersion, get_bound, rate_distortion
from lossy_fbl.bounds_binary import (bms_achievability_cc, bms_converse_ht,
                                     bms_converse_tilted, ebms_achievability, ebms_converse)
from lossy_fbl.bounds_dms import (
    dms_achievability_cc, dms_cc_tables, dms_converse_ht, dms_converse_tilted,
    dms_gaussian_approx, dms_ht_test, edms_achievability, edms_converse, enumerate_types,
    round_composition, type_log_counts,
)
from lossy_fbl.errors import BudgetExceededError, ConvergenceError
from lossy_fbl.numerics import log_hamming_ball

FIG4_PMF = (1 / 3, 1 / 4, 1 / 4, 1 / 6)
LN2 = math.log(2)


@pytest.mark.parametrize("n,m", [(1, 2), (10, 3), (30, 4), (12, 5)])
def test_type_enumeration_complete(n, m):
    types = enumerate_types(n, m)
    assert len(types) == math.comb(n + m - 1, m - 1)
    assert (types.sum(axis=1) == n).all()


@given(st.integers(1, 60), st.lists(st.floats(0.05, 1.0), min_size=2, max_size=4))
def test_multinomial_normalisation(n, w):
    pmf = np.sort(np.array(w) / sum(w))[::-1]
    types = enumerate_types(n, len(pmf))
    total = special.logsumexp(type_log_counts(types) + types @ np.log(pmf))
    assert math.exp(total) == pytest.approx(1.0, abs=1e-9)


def test_type_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_types(500, 4)


def test_round_composition_sums_to_n():
    for n in (1, 7, 60, 333):
        t = round_composition([0.4, 0.3, 0.2, 0.1], n)
        assert t.sum() == n and (t >= 0).all()
        assert np.all(np.abs(t - n * np.array([0.4, 0.3, 0.2, 0.1])) < 1 + 1e-9)


@given(st.integers(1, 150), st.floats(0.0, 0.49), st.floats(-5, 100))
def test_equiprobable_two_letters_reduce(n, d, log_m):
    assert edms_converse(n, d, log_m, 2) == ebms_converse(n, d, log_m)
    assert edms_achievability(n, d, log_m, 2) == ebms_achievability(n, d, log_m)


def test_equiprobable_converse_full_space():
    assert edms_converse(6, 0, 6 * math.log(3), 3) == 0.0


TWO_LETTER_POINTS = [(0.4, 30, 0.11), (0.4, 100, 0.11), (0.3, 50, 0.2), (0.2, 80, 0.05),
                     (0.45, 64, 0.3)]


@pytest.mark.parametrize("p,n,d", TWO_LETTER_POINTS)
def test_two_letter_converses_match_binary(p, n, d):
    pmf = (1 - p, p)
    for log_m in np.linspace(0.2 * n * LN2 * 0.2, n * LN2 * 0.8, 7):
        assert dms_converse_tilted(pmf, n, d, log_m) == pytest.approx(
            bms_converse_tilted(p, n, d, log_m), abs=1e-10)
    for eps in (0.01, 0.1, 0.5):
        assert dms_converse_ht(pmf, n, d, eps) == pytest.approx(
            bms_converse_ht(p, n, d, eps), abs=1e-10)


@pytest.mark.parametrize("p,n,d", TWO_LETTER_POINTS)
def test_two_letter_constant_composition_matches_binary(p, n, d):
    for log_m in np.linspace(0.1, n * LN2 * 0.9, 7):
        assert dms_achievability_cc((1 - p, p), n, d, log_m) == pytest.approx(
            bms_achievability_cc(p, n, d, log_m), abs=1e-9)


@pytest.mark.parametrize("n,m,eps", [(10, 3, 0.1), (30, 4, 0.01), (25, 2, 0.3)])
def test_equiprobable_ht_numerator(n, m, eps):
    pmf = (1 / m,) * m
    _, _, log_num = dms_ht_test(pmf, n, eps)
    assert log_num == pytest.approx(math.log1p(-eps) + n * math.log(m), rel=1e-12)
    d = 0.2
    expect = math.log1p(-eps) + n * math.log(m) - log_hamming_ball(n, math.floor(n * d + 1e-9), m)
    assert dms_converse_ht(pmf, n, d, eps) == pytest.approx(expect, rel=1e-12)


def test_ht_cut_point_against_enumeration():
    n, eps = 40, 0.1
    pmf = np.array(FIG4_PMF)
    groups = {}
    for k in itertools.product(range(n + 1), repeat=3):
        if sum(k) > n:
            continue
        c = (*k, n - sum(k))
        lp = float(np.dot(c, np.log(pmf)))
        key = round(lp, 9)
        mass = math.exp(math.lgamma(n + 1) - sum(math.lgamma(x + 1) for x in c) + lp)
        groups[key] = groups.get(key, 0.0) + mass
    masses = [groups[k] for k in sorted(groups, reverse=True)]
    cum = np.cumsum(masses)
    g_star, alpha, _ = dms_ht_test(FIG4_PMF, n, eps)
    assert g_star == int(np.searchsorted(cum, 1 - eps, side="right")) - 1
    cum_star = cum[g_star] if g_star >= 0 else 0.0
    assert cum_star <= 1 - eps < cum[g_star + 1]
    assert alpha == pytest.approx((1 - eps - cum_star) / masses[g_star + 1], rel=1e-8)


def test_far_types_get_no_ball_mass():
    n, d = 30, 0.2
    log_prob, log_w = dms_cc_tables(FIG4_PMF, n, d)
    types = enumerate_types(n, 4)
    far = int(np.flatnonzero((types == [0, 0, 0, n]).all(axis=1))[0])
    assert log_w[far] == -math.inf
    # its probability mass then enters the bound in full, whatever M is
    assert dms_achievability_cc(FIG4_PMF, n, d, 500.0) >= math.exp(log_prob[far])


@given(st.integers(1, 40), st.floats(0.02, 0.6), st.lists(st.floats(-2, 60), min_size=2,
                                                          max_size=5))
def test_dms_bounds_range_and_monotone(n, d, grid):
    grid = sorted(grid)
    for fn in (dms_converse_tilted, dms_achievability_cc):
        vals = [fn(FIG4_PMF, n, d, g) for g in grid]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:]))


def test_tilted_converse_range_at_100():
    v = dms_converse_tilted(FIG4_PMF, 100, 0.1, 100 * 1.0)
    assert 0.0 <= v <= 1.0


@pytest.mark.parametrize("n,d,eps", [(60, 0.2, 0.1), (40, 0.3, 0.1), (60, 0.4, 0.01),
                                     (30, 0.55, 0.1)])
def test_dms_sandwich(n, d, eps):
    src = DMS(FIG4_PMF)
    ach = get_bound(src, "cc-ach").rate(n, d, eps).log_M_nats
    assert get_bound(src, "ht-converse").rate(n, d, eps).log_M_nats <= ach
    assert get_bound(src, "tilted-converse").rate(n, d, eps).log_M_nats <= ach


def test_equiprobable_approx_inside_bound_pair():
    src = DMS((0.25,) * 4)
    n, d, eps = 100, 0.25, 1e-2
    approx = dms_gaussian_approx(src.pmf, n, d, eps)
    R = rate_distortion(src, d) / LN2
    assert approx == pytest.approx(R + 0.5 * math.log2(n) / n, rel=1e-14)
    conv = get_bound(src, "edms-converse").rate(n, d, eps).rate_bits
    ach = get_bound(src, "edms-ach").rate(n, d, eps).rate_bits
    assert conv <= approx <= ach


def test_approx_envelope_coefficient():
    n, d, eps = 200, 0.2, 0.1
    src = DMS(FIG4_PMF)
    base = dms_gaussian_approx(FIG4_PMF, n, d, eps, remainder="zero")
    env = dms_gaussian_approx(FIG4_PMF, n, d, eps, remainder="dms_envelope")
    expect = (3 * 3 / 2 * math.log(n) + math.log(math.log(n))) / n / LN2
    assert env - base == pytest.approx(expect, rel=1e-12)
    V = dispersion(src, d)
    assert V == pytest.approx(src.varentropy())


def test_constant_composition_floor_refuses_unreachable_eps():
    # types with no admissible joint type carry about 0.42 of the mass here
    log_prob, log_w = dms_cc_tables(FIG4_PMF, 40, 0.1)
    floor = float(np.exp(log_prob[log_w == -np.inf]).sum())
    assert dms_achievability_cc(FIG4_PMF, 40, 0.1, 1e6) >= floor - 1e-12
    with pytest.raises(ConvergenceError):
        get_bound(DMS(FIG4_PMF), "cc-ach").rate(40, 0.1, 0.1)
