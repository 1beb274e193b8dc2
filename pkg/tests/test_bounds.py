import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gti.bounds import (
    binary_entropy,
    fano_lb_dcp,
    fano_lb_scp,
    fano_lb_ub_scenario,
    first_argmax,
    g_opt_search,
    log2_binom,
    max_outcome_entropy,
    p_y,
    p_y_curve,
    switch_points,
)

from conftest import ref_p_y


def exact_argmax(n, d, r):
    """Leftmost maximizer over every pool size, in exact rationals."""
    best_g, best = 1, ref_p_y(n, d, r, 1)
    for g in range(2, n + 1):
        v = ref_p_y(n, d, r, g)
        if v > best:
            best_g, best = g, v
    return best_g


def test_single_item_pool():
    assert p_y(10, 1, 1, 1) == 0.1
    assert p_y(1000, 7, 30, 1) == 7 / 1000


def test_pool_too_large_for_clean_outcome():
    assert p_y(50, 2, 5, 46) == 0.0
    assert p_y(50, 2, 5, 45) > 0.0


def test_small_instance_against_counting():
    assert p_y(40, 2, 5, 8) == pytest.approx(float(ref_p_y(40, 2, 5, 8)), rel=1e-12)


@settings(max_examples=400, deadline=None)
@given(st.integers(1, 120), st.data())
def test_p_y_matches_counting(n, data):
    d = data.draw(st.integers(0, min(n, 8)))
    r = data.draw(st.integers(0, min(n - d, 8)))
    g = data.draw(st.integers(1, n))
    want = ref_p_y(n, d, r, g)
    got = p_y(n, d, r, g)
    assert 0.0 <= got <= 1.0
    assert (got == 0.0) == (want == 0)
    assert (got == 0.0) == (d == 0 or g > n - r)
    assert got == pytest.approx(float(want), rel=1e-12)


@pytest.mark.parametrize("n, d, r", [(2000, 2, 40), (300, 5, 1), (50, 0, 3), (64, 3, 0)])
def test_curve_matches_pointwise(n, d, r):
    curve = p_y_curve(n, d, r)
    point = [p_y(n, d, r, g) for g in range(1, n + 1)]
    np.testing.assert_allclose(curve, point, rtol=1e-11, atol=0)


@pytest.mark.parametrize("g", [0, 11])
def test_pool_size_out_of_range(g):
    with pytest.raises(ValueError):
        p_y(10, 1, 1, g)


def test_switch_points_near_n_over_r():
    g0, g1 = switch_points(10**6, 10, 1000)
    assert 0.98 <= g0 / 1000 <= 1.02
    assert 0.98 <= g1 / 1000 <= 1.02


def test_upper_switch_point_formula():
    _, g1 = switch_points(10**4, 1, 100)
    assert g1 == pytest.approx(math.log(1.01) / math.log(1 + 1 / 9899), rel=1e-12)


def test_switch_points_need_inhibitors():
    with pytest.raises(ValueError):
        switch_points(100, 2, 0)


def test_monotone_outside_switch_points():
    n, d, r = 5000, 2, 50
    g0, g1 = switch_points(n, d, r)
    curve = p_y_curve(n, d, r)
    rising = curve[: math.floor(g0)]
    falling = curve[math.ceil(g1) - 1: n - d - r]
    assert np.all(np.diff(rising) >= 0)
    assert np.all(np.diff(falling) <= 0)


def test_peak_near_asymptote():
    a = g_opt_search(10**6, 5, 500)
    assert 0.95 <= a.p_y_max * 500 * math.e / 5 <= 1.05
    assert a.asymptote == pytest.approx(5 / (500 * math.e))


def test_peak_for_moderate_population():
    # exhaustive rational scan: p_y(90) == p_y(91) exactly and both beat the rest
    assert exact_argmax(1000, 1, 10) == 90
    assert ref_p_y(1000, 1, 10, 90) == ref_p_y(1000, 1, 10, 91)
    assert g_opt_search(1000, 1, 10).g_opt == 90


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 90), st.data())
def test_peak_matches_exhaustive_scan(n, data):
    r = data.draw(st.integers(1, n - 2))
    d = data.draw(st.integers(1, n - r - 1))
    a = g_opt_search(n, d, r)
    assert a.g_opt == exact_argmax(n, d, r)
    assert a.p_y_max == pytest.approx(float(ref_p_y(n, d, r, a.g_opt)), rel=1e-12)


@pytest.mark.parametrize("n, d, r", [(2000, 2, 40), (5000, 2, 50), (10**5, 5, 200), (10**6, 10, 1000)])
def test_peak_inside_switch_point_bracket(n, d, r):
    a = g_opt_search(n, d, r)
    assert math.floor(a.g0) - 2 <= a.g_opt <= math.ceil(a.g1) + 2
    assert 0 < a.p_y_max < 0.5


def test_peak_at_huge_n():
    a = g_opt_search(10**12, 2, 20)
    assert abs(a.g_opt / (10**12 / 20) - 1) < 0.1
    # neighbours agree to double precision this far out
    for g in (a.g_opt - 1, a.g_opt + 1):
        assert a.p_y_max >= p_y(10**12, 2, 20, g) * (1 - 1e-12)


def test_first_argmax_prefers_left_end():
    assert first_argmax([0.1, 0.5, 0.5 * (1 + 1e-15), 0.2]) == 1


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    with pytest.raises(ValueError):
        binary_entropy(1.5)


@pytest.mark.parametrize("n, d, r", [(100, 20, 1), (60, 10, 2), (40, 5, 0), (200, 3, 30), (30, 1, 1)])
def test_max_entropy_against_scan(n, d, r):
    best = max(binary_entropy(float(ref_p_y(n, d, r, g))) for g in range(1, n + 1))
    assert max_outcome_entropy(n, d, r)[0] == pytest.approx(best, rel=1e-12)


def test_log2_binom():
    assert log2_binom(10**6, 10) == pytest.approx(math.log2(math.comb(10**6, 10)), rel=1e-12)
    assert log2_binom(5, 0) == 0.0
    assert log2_binom(10**9, 3 * 10**5) == pytest.approx(
        math.lgamma(10**9 + 1) / math.log(2) - math.lgamma(3 * 10**5 + 1) / math.log(2)
        - math.lgamma(10**9 - 3 * 10**5 + 1) / math.log(2), rel=1e-9)


def test_numerator_without_error_is_the_count():
    rep = fano_lb_scp(10**5, 3, 40, 0.0)
    want = math.log2(math.comb(10**5, 3) * math.comb(10**5 - 3, 40))
    assert rep.numerator_bits == pytest.approx(want, rel=1e-12)
    assert rep.tests_lb == pytest.approx(want / rep.max_entropy)
    assert rep.max_entropy == pytest.approx(binary_entropy(rep.pool.p_y_max))


def test_scp_bound_order():
    n, d, r = 10**6, 10, 1000
    ref = r * r / (d * math.log2(r / d)) * math.log2(n)
    assert 0.1 <= fano_lb_scp(n, d, r).tests_lb / ref <= 10


def test_dcp_bound_order():
    n, d, r = 10**6, 10, 1000
    ref = r / math.log2(r / d) * math.log2(n)
    assert 0.1 <= fano_lb_dcp(n, d, r).tests_lb / ref <= 10


def test_bound_decreases_with_error_probability():
    vals = [fano_lb_scp(10**4, 2, 30, pe).tests_lb for pe in np.linspace(0, 0.49, 12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50), st.integers(1, 500), st.floats(0, 0.9))
def test_dcp_below_scp(d, r, pe):
    assert fano_lb_dcp(10**5, d, r, pe).tests_lb <= fano_lb_scp(10**5, d, r, pe).tests_lb


def test_regime_flag():
    assert not fano_lb_scp(10**4, 5, 5).in_order_regime
    assert fano_lb_scp(10**4, 5, 50).in_order_regime


def test_bound_grows_like_log_n():
    ratio = fano_lb_scp(10**12, 2, 20).tests_lb / fano_lb_scp(10**6, 2, 20).tests_lb
    assert 1.8 <= ratio <= 2.3


@pytest.mark.parametrize("pe", [-0.1, 1.0])
def test_bad_error_probability(pe):
    with pytest.raises(ValueError):
        fano_lb_scp(100, 2, 3, pe)


def test_ub_scenario_branches():
    assert fano_lb_ub_scenario(10**6, 2, 1000).branch == "counting"
    rep = fano_lb_ub_scenario(10**6, 300, 5)
    assert rep.branch == "fano"
    assert rep.tests_lb == pytest.approx(fano_lb_scp(10**6, 1, 300).tests_lb)


def test_ub_scenario_dcp_single_inhibitor():
    rep = fano_lb_ub_scenario(10**6, 1, 50, problem="dcp")
    assert rep.branch == "counting"
    assert rep.tests_lb == pytest.approx(log2_binom(10**6, 50))


def test_ub_scenario_errors():
    with pytest.raises(ValueError):
        fano_lb_ub_scenario(100, 0, 3)
    with pytest.raises(ValueError):
        fano_lb_ub_scenario(100, 3, 3, problem="xyz")
