import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lossy_fbl import (BES, BMS, DMS, GMS, d_range, dispersion, distortion_dispersion,
                       distortion_rate, lambda_star, rate_distortion, rd_point,
                       required_blocklength, tilted_info_dist)
from lossy_fbl.errors import DomainError
from lossy_fbl.numerics import q_inv
from lossy_fbl.sources import dms_water_level

LN2 = math.log(2)
FIG4_PMF = (1 / 3, 1 / 4, 1 / 4, 1 / 6)


def h(x):
    # entropy in nats, written independently of the package
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def test_source_validation():
    for bad in (lambda: BMS(0.6), lambda: BMS(0.0), lambda: DMS((0.2, 0.8)),
                lambda: DMS((0.5, 0.4)), lambda: BES(1.0), lambda: GMS(0.0)):
        with pytest.raises(DomainError):
            bad()


def test_d_ranges():
    assert d_range(BMS(0.4)) == (0.0, 0.4)
    assert d_range(GMS(1.0)) == (0.0, 1.0)
    lo, hi = d_range(DMS(FIG4_PMF))
    assert lo == 0.0 and hi == pytest.approx(2 / 3)
    assert d_range(BES(0.1)) == (0.05, 0.5)
    assert BES(0.1).bound_range == (0.05, 0.95)


def test_rate_distortion_values():
    assert rate_distortion(GMS(1.0), 0.25) == pytest.approx(LN2, rel=1e-15)
    bms = rate_distortion(BMS(0.4), 0.11) / LN2
    assert bms == pytest.approx((h(0.4) - h(0.11)) / LN2, rel=1e-12)
    assert bms == pytest.approx(0.4711, abs=1e-4)
    bes = rate_distortion(BES(0.1), 0.1)
    assert bes == pytest.approx(0.9 * (LN2 - h(1 / 18)), rel=1e-12)
    assert bes / LN2 == pytest.approx(0.6215, abs=1e-3)
    assert rate_distortion(BMS(0.4), 0.5) == 0.0
    assert rate_distortion(GMS(2.0), 3.0) == 0.0


def test_water_level_symmetric_case():
    wl = dms_water_level((0.25,) * 4, 0.3)
    assert wl.eta == pytest.approx(0.1)
    assert wl.m_eta == 4


def _water_level_oracle(pmf, d):
    # solve for each candidate m_eta and keep the one that brackets eta
    m = len(pmf)
    for m_eta in range(2, m + 1):
        eta = (d - sum(pmf[m_eta:])) / (m_eta - 1)
        nxt = pmf[m_eta] if m_eta < m else 0.0
        if pmf[m_eta - 1] > eta >= nxt:
            return eta, m_eta
    raise AssertionError("no consistent pair")


@pytest.mark.parametrize("d", [0.05, 0.2, 0.45, 0.6])
def test_water_level_matches_scan(d):
    wl = dms_water_level(FIG4_PMF, d)
    eta, m_eta = _water_level_oracle(FIG4_PMF, d)
    assert wl.m_eta == m_eta
    assert wl.eta == pytest.approx(eta, rel=1e-12)
    assert FIG4_PMF[m_eta - 1] > wl.eta
    assert wl.p_y.sum() == pytest.approx(1.0)


def test_water_level_small_d():
    d = 0.3  # below 3 * (1/6)
    wl = dms_water_level(FIG4_PMF, d)
    assert wl.m_eta == 4 and wl.eta == pytest.approx(d / 3)


def test_tilted_info_examples():
    t = tilted_info_dist(BMS(0.5), 0.11)
    assert len(t.values) == 1
    assert t.values[0] == pytest.approx(LN2 - h(0.11))
    t = tilted_info_dist(BMS(0.4), 0.11)
    expect = sorted([(-math.log(0.4) - h(0.11), 0.4), (-math.log(0.6) - h(0.11), 0.6)])
    assert np.allclose(t.values, [v for v, _ in expect])
    assert np.allclose(t.probs, [p for _, p in expect])


def test_dispersion_values():
    assert dispersion(GMS(3.0), 1.7) == 0.5
    assert dispersion(BMS(0.4), 0.11) == pytest.approx(0.24 * math.log(1.5) ** 2, rel=1e-14)
    assert dispersion(BMS(0.4), 0.11) == pytest.approx(0.039456, abs=1e-6)
    assert dispersion(BMS(0.5), 0.2) == 0.0


def test_bes_lambda_at_point():
    assert lambda_star(BES(0.1), 0.1) == pytest.approx(math.log(17), rel=1e-14)


def test_bes_dispersion_equals_atom_variance():
    for delta in (0.05, 0.1, 0.3, 0.6):
        src = BES(delta)
        for d in np.linspace(delta / 2 + 0.01, 0.49, 7):
            assert dispersion(src, d) == pytest.approx(tilted_info_dist(src, d).var(),
                                                       rel=1e-12, abs=1e-15)


def test_bes_dispersion_diverges_near_lower_end():
    src = BES(0.1)
    ds = [0.05 + 10.0 ** -k for k in range(2, 9)]
    vs = [dispersion(src, d) for d in ds]
    assert all(b > a for a, b in zip(vs, vs[1:]))
    assert vs[-1] > 10 * vs[0]


def _sources_and_grids():
    yield BMS(0.4), np.linspace(0.02, 0.38, 12)
    yield BMS(0.2), np.linspace(0.01, 0.19, 12)
    yield DMS(FIG4_PMF), np.linspace(0.02, 0.64, 25)
    yield DMS((0.5, 0.3, 0.2)), np.linspace(0.02, 0.48, 15)
    yield BES(0.1), np.linspace(0.06, 0.49, 15)
    yield GMS(2.0), np.linspace(0.1, 1.9, 12)


@pytest.mark.parametrize("src,grid", list(_sources_and_grids()))
def test_tilted_mean_is_rate(src, grid):
    if isinstance(src, GMS):
        return
    for d in grid:
        t = tilted_info_dist(src, d)
        assert t.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert t.mean() == pytest.approx(rate_distortion(src, d), abs=1e-9)


@pytest.mark.parametrize("src,grid", list(_sources_and_grids()))
def test_lambda_is_minus_slope(src, grid):
    for d in grid:
        step = 1e-6 * (d_range(src)[1] - d_range(src)[0])
        fd = -(rate_distortion(src, d + step) - rate_distortion(src, d - step)) / (2 * step)
        assert lambda_star(src, d) == pytest.approx(fd, rel=1e-5)


@pytest.mark.parametrize("src,grid", list(_sources_and_grids()))
def test_rate_convex_nonincreasing(src, grid):
    r = np.array([rate_distortion(src, d) for d in grid])
    assert (np.diff(r) <= 1e-15).all()
    second = r[:-2] - 2 * r[1:-1] + r[2:]
    assert (second >= -1e-12).all()


@given(st.floats(0.05, 0.5), st.floats(0.01, 0.99))
def test_dms_two_letters_match_bms(p, frac):
    d = frac * p
    b, m = BMS(p), DMS((1 - p, p))
    assert rate_distortion(m, d) == pytest.approx(rate_distortion(b, d), abs=1e-12)
    assert dispersion(m, d) == pytest.approx(dispersion(b, d), abs=1e-12)
    tb, tm = tilted_info_dist(b, d), tilted_info_dist(m, d)
    assert np.allclose(tb.values, tm.values, atol=1e-12)
    assert np.allclose(tb.probs, tm.probs, atol=1e-12)


def test_dms_small_d_dispersion_is_varentropy():
    src = DMS(FIG4_PMF)
    for d in (0.01, 0.1, 0.3, 0.49):
        assert dispersion(src, d) == pytest.approx(src.varentropy(), rel=1e-12)


def test_dms_dispersion_continuous_across_breakpoints():
    src = DMS(FIG4_PMF)
    # breakpoints where m_eta changes: d = 3/6 and d = 2/4 + 1/6
    for b in (0.5, 2 / 3 - 1 / 6):
        lo, hi = dispersion(src, b - 1e-9), dispersion(src, b + 1e-9)
        assert lo == pytest.approx(hi, abs=1e-6)


def test_bes_without_erasures_is_equiprobable_binary():
    src = BES(0.0)
    for d in (0.05, 0.2, 0.4):
        assert rate_distortion(src, d) == pytest.approx(LN2 - h(d), abs=1e-14)
        assert dispersion(src, d) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("R", [0.1, 0.5, LN2, 1.5, 3.0])
def test_gms_distortion_dispersion_ratio(R):
    src = GMS(1.7)
    d = distortion_rate(src, R)
    assert d == pytest.approx(1.7 * math.exp(-2 * R), rel=1e-15)
    assert distortion_dispersion(src, R) / d ** 2 == pytest.approx(2.0, abs=1e-9)


def test_distortion_rate_round_trip():
    assert distortion_rate(GMS(1.0), LN2) == pytest.approx(0.25)
    src = BMS(0.4)
    assert distortion_rate(src, rate_distortion(src, 0.11)) == pytest.approx(0.11, abs=1e-9)
    with pytest.raises(DomainError):
        distortion_rate(src, 5.0)


def test_required_blocklength():
    plan = required_blocklength(GMS(1.0), "distortion", LN2, 0.1, 1e-2)
    assert plan.n == pytest.approx(2 * (q_inv(1e-2) / 0.1) ** 2, rel=1e-9)
    assert plan.n == pytest.approx(1082.3, abs=0.5)
    zero = required_blocklength(BMS(0.5), "rate", 0.11, 0.1, 1e-2)
    assert zero.n == 0.0 and zero.zero_dispersion
    ns = [required_blocklength(BES(0.1), "rate", d, 0.1, 1e-2).n
          for d in (0.07, 0.06, 0.051, 0.0501, 0.05001)]
    assert all(b > a for a, b in zip(ns, ns[1:]))


def test_rd_point_fields():
    pt = rd_point(DMS(FIG4_PMF), 0.55)
    wl = dms_water_level(FIG4_PMF, 0.55)
    assert pt.m_eta == wl.m_eta and pt.eta == wl.eta
    assert pt.lambda_star == pytest.approx(math.log((1 - 0.55) / wl.eta))
