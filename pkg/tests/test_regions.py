"""Rate-region tests against independently derived constants.

Frozen values come from 40-digit mpmath evaluations and, for the HK maxima,
an LP over the seven split bounds solved with scipy.optimize.linprog on the
same 51x51 split grid (see the repository notes for the derivations).
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satnoma.regions import (BcNomaParams, LinkPair, RateRegion, capacity,
                             rate_ian, region_contains, region_hk,
                             region_noma_bc, region_orthogonal,
                             region_two_user)

C5 = 2.5849625007211562        # C(5): per-user ian corner at s=10, i=1
C10 = 3.4594316186372973
C11 = 3.5849625007211562
C20 = 4.3923174227787603       # orthogonal max sum at s=10 (alpha = 1/2)
HK_SQRT10 = 4.035836656232438  # LP max sum at s=10, i=sqrt(10)

SYM = LinkPair(10.0, 10.0, 1.0, 1.0)


def test_capacity_reference_points():
    assert capacity(1.0) == 1.0
    assert capacity(3.0) == 2.0
    assert capacity(0.0) == 0.0


def test_rate_ian_formula():
    assert rate_ian(10.0, 1.0) == pytest.approx(C5, abs=1e-12)
    assert rate_ian(9.0, 0.0) == pytest.approx(capacity(9.0), rel=1e-15)


def test_ian_rectangle_corner():
    reg = region_two_user(SYM, "ian")
    assert reg.max_sum_rate() == pytest.approx(2 * C5, abs=1e-9)
    assert reg.contains_point(C5 - 1e-9, C5 - 1e-9)
    assert not reg.contains_point(C5 + 1e-6, 0.0)


def test_sd_caps_by_cross_decodability():
    # joint decoding at both receivers caps each rate by the cross link C(i)=1
    reg = region_two_user(SYM, "sd")
    assert reg.max_sum_rate() == pytest.approx(2.0, abs=1e-9)
    assert reg.contains_point(1.0 - 1e-9, 1.0 - 1e-9)
    assert not reg.contains_point(1.0 + 1e-6, 0.5)


def test_snd_takes_the_better_branch():
    reg = region_two_user(SYM, "snd")
    assert reg.max_sum_rate() == pytest.approx(2 * C5, abs=1e-9)
    for mode in ("ian", "sd"):
        assert region_contains(reg, region_two_user(SYM, mode), tol=1e-9)


def test_snd_union_exceeds_both_branches_somewhere():
    # strong interference: sd unlocks points ian cannot reach
    link = LinkPair(10.0, 10.0, 30.0, 30.0)
    ian = region_two_user(link, "ian")
    snd = region_two_user(link, "snd")
    assert snd.max_sum_rate() > ian.max_sum_rate() + 0.5


def test_boundary_sorted_and_pareto():
    reg = region_two_user(LinkPair(12.0, 4.0, 2.0, 0.7), "snd")
    b = reg.boundary
    assert np.all(np.diff(b[:, 0]) >= 0)
    assert np.all(np.diff(b[:, 1]) <= 1e-12)


def test_hk_full_private_reduces_to_ian():
    for link in (SYM, LinkPair(14.0, 3.0, 2.5, 0.4)):
        hk = region_hk(link, splits=[[1.0, 1.0]])
        ian = region_two_user(link, "ian")
        assert region_contains(hk, ian, tol=1e-9)
        assert region_contains(ian, hk, tol=1e-9)
        assert hk.max_sum_rate() == pytest.approx(ian.max_sum_rate(), abs=1e-9)


def test_hk_at_moderate_interference_lp_value():
    i = float(np.sqrt(10.0))
    link = LinkPair(10.0, 10.0, i, i)
    hk = region_hk(link)
    orth = region_orthogonal(link)
    assert hk.max_sum_rate() == pytest.approx(HK_SQRT10, abs=1e-9)
    assert orth.max_sum_rate() == pytest.approx(C20, abs=1e-9)
    # at i = sqrt(s) power-preserving orthogonalization beats rate splitting
    assert orth.max_sum_rate() > hk.max_sum_rate() + 0.3


def test_hk_symmetric_equals_full_cooperation_sum():
    # SNR = INR: the all-common split attains C(2s), as does orthogonal
    s = 10.0
    link = LinkPair(s, s, s, s)
    hk = region_hk(link)
    orth = region_orthogonal(link)
    assert hk.max_sum_rate() == pytest.approx(C20, abs=1e-9)
    assert abs(hk.max_sum_rate() - orth.max_sum_rate()) <= 1e-9
    assert region_contains(hk, orth, tol=1e-6)


def test_hk_swapped_link_mirrors_region():
    link = LinkPair(12.0, 5.0, 3.0, 1.2)
    a = region_hk(link)
    b = region_hk(link.swapped())
    for r1, r2 in a.boundary[::20]:
        assert b.contains_point(r2 - 1e-7, r1 - 1e-7)


def test_noma_bc_endpoints_exact():
    par = BcNomaParams(p=17.39, g_s=0.9, g_w=0.2)
    lo = region_noma_bc(par, betas=[0.0])
    hi = region_noma_bc(par, betas=[1.0])
    # beta is the weak-user power share; points are (r_w, r_s)
    assert lo.boundary[-1][1] == capacity(par.p * par.g_s)
    assert lo.boundary[-1][0] == 0.0
    assert hi.boundary[-1][0] == capacity(par.p * par.g_w)


def test_noma_bc_grid_points_achievable():
    par = BcNomaParams(p=10.0, g_s=1.0, g_w=0.25)
    reg = region_noma_bc(par)
    beta = 0.62
    r_w = capacity(beta * 2.5 / (1 + (1 - beta) * 2.5))
    r_s = capacity((1 - beta) * 10.0)
    assert reg.contains_point(r_w - 1e-9, r_s - 1e-9)
    with pytest.raises(ValueError):
        region_noma_bc(par, betas=[])
    with pytest.raises(ValueError):
        region_noma_bc(par, betas=[-0.1])


def test_orthogonal_ignores_interference():
    a = region_orthogonal(LinkPair(10.0, 10.0, 1.0, 1.0))
    b = region_orthogonal(LinkPair(10.0, 10.0, 25.0, 3.0))
    np.testing.assert_allclose(a.boundary, b.boundary, atol=1e-12)
    assert a.max_sum_rate() == pytest.approx(C20, abs=1e-9)


def test_orthogonal_boosts_per_hertz_power():
    # alpha C(s/alpha) > alpha C(s): concentrating power helps
    reg = region_orthogonal(LinkPair(10.0, 10.0, 0.0, 0.0))
    r1 = 0.5 * capacity(20.0)
    assert reg.contains_point(r1 - 1e-9, r1 - 1e-9)


def test_region_contains_is_reflexive_and_ordered():
    reg = region_two_user(SYM, "snd")
    assert region_contains(reg, reg, tol=1e-9)
    small = region_two_user(LinkPair(2.0, 2.0, 1.0, 1.0), "ian")
    assert region_contains(reg, small, tol=1e-9)
    assert not region_contains(small, reg, tol=1e-9)


@settings(max_examples=25, deadline=None)
@given(
    s1=st.floats(1.0, 1000.0), s2=st.floats(1.0, 1000.0),
    i1=st.floats(0.1, 1000.0), i2=st.floats(0.1, 1000.0),
)
def test_property_snd_contains_both_branches(s1, s2, i1, i2):
    link = LinkPair(s1, s2, i1, i2)
    snd = region_two_user(link, "snd", n_dirs=41)
    assert region_contains(snd, region_two_user(link, "ian", n_dirs=41), tol=1e-9)
    assert region_contains(snd, region_two_user(link, "sd", n_dirs=41), tol=1e-9)


@settings(max_examples=15, deadline=None)
@given(s=st.floats(0.5, 500.0), i=st.floats(0.1, 500.0))
def test_property_hk_contains_ian(s, i):
    link = LinkPair(s, s, i, i)
    hk = region_hk(link, n_dirs=41)
    ian = region_two_user(link, "ian", n_dirs=41)
    assert region_contains(hk, ian, tol=1e-7)
