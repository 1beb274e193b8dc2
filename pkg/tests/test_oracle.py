import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from gti.bounds import p_y
from gti.model import PoolingDesign, Population, simulate_outcomes
from gti.oracle import (
    ResourceLimitError,
    consistent_assignments,
    empirical_event_tail,
    empirical_p_y,
    positive_pool_fraction,
)

from conftest import TINY_M, TINY_Y, ref_outcomes, ref_p_y


def naive_consistent(m, y, d, r):
    n = len(m[0])
    out = []
    for dset in itertools.combinations(range(n), d):
        rest = [j for j in range(n) if j not in dset]
        for iset in itertools.combinations(rest, r):
            if ref_outcomes(m, dset, iset) == list(y):
                out.append((dset, iset))
    return sorted(out)


def test_worked_example_is_identifiable():
    cs = consistent_assignments(PoolingDesign.from_dense(TINY_M), TINY_Y, 1, 1)
    assert cs.assignments == (((0,), (1,)),)
    assert cs.identifiable
    assert cs.to_dict() == {"assignments": [{"defectives": [1], "inhibitors": [2]}], "identifiable": True}


def test_silent_outcomes_rule_out_a_lone_defective():
    m = [[1, 1, 0], [0, 1, 1]]
    cs = consistent_assignments(PoolingDesign.from_dense(m), [0, 0], 1, 0)
    assert cs.assignments == ()
    assert not cs.identifiable


def test_individual_testing():
    n = 6
    design = PoolingDesign.from_dense(np.eye(n, dtype=np.uint8))
    y = [0, 0, 1, 0, 0, 0]
    cs = consistent_assignments(design, y, 1, 0)
    assert cs.assignments == (((2,), ()),)


@settings(max_examples=250, deadline=None)
@given(st.integers(2, 7), st.integers(1, 8), st.data())
def test_pruned_search_matches_naive(n, T, data):
    m = data.draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=T, max_size=T))
    d = data.draw(st.integers(0, n))
    r = data.draw(st.integers(0, n - d))
    truth_d = data.draw(st.sets(st.integers(0, n - 1), min_size=d, max_size=d))
    truth_i = data.draw(st.sets(st.sampled_from(sorted(set(range(n)) - truth_d)), min_size=r, max_size=r)
                        if r else st.just(set()))
    y = ref_outcomes(m, truth_d, truth_i)
    got = consistent_assignments(PoolingDesign.from_dense(m), y, d, r)
    assert list(got.assignments) == naive_consistent(m, y, d, r)
    assert (tuple(sorted(truth_d)), tuple(sorted(truth_i))) in got.assignments


def test_size_guard():
    design = PoolingDesign.from_dense(np.ones((2, 60), dtype=np.uint8))
    with pytest.raises(ResourceLimitError):
        consistent_assignments(design, [0, 0], 5, 5)


def test_dimension_guard():
    with pytest.raises(ValueError):
        consistent_assignments(PoolingDesign.from_dense(TINY_M), [0, 1], 1, 1)


@pytest.mark.parametrize("n, d, r, g, want", [(5, 1, 1, 5, 0.0), (6, 1, 1, 1, 1 / 6)])
def test_p_y_trivial_cases(n, d, r, g, want):
    for method in ("count", "enumerate"):
        assert empirical_p_y(n, d, r, g, method=method).value == pytest.approx(want, abs=0)


def test_p_y_cross_module():
    assert empirical_p_y(40, 2, 5, 8).value == pytest.approx(p_y(40, 2, 5, 8), rel=1e-12)


@pytest.mark.parametrize("n, d, r", [(12, 2, 3), (10, 1, 0), (9, 3, 3)])
def test_enumeration_agrees_with_counting(n, d, r):
    for g in range(1, n + 1):
        assert empirical_p_y(n, d, r, g, method="enumerate").value == pytest.approx(
            float(positive_pool_fraction(n, d, r, g)), abs=1e-15)
        assert positive_pool_fraction(n, d, r, g) == ref_p_y(n, d, r, g)


def test_sampling_within_half_width():
    est = empirical_p_y(200, 3, 10, 20, method="sample", samples=40_000, seed=4)
    assert est.half_width > 0
    assert abs(est.value - p_y(200, 3, 10, 20)) <= est.half_width


def test_enumeration_guard():
    with pytest.raises(ResourceLimitError):
        empirical_p_y(60, 2, 3, 10, method="enumerate")


def test_p_y_bad_method():
    with pytest.raises(ValueError):
        empirical_p_y(10, 1, 1, 2, method="guess")


def test_tail_edges():
    assert empirical_event_tail(20, 0.3, 0) == 1.0
    assert empirical_event_tail(20, 0.3, 21) == 0.0
    with pytest.raises(ValueError):
        empirical_event_tail(10, 1.2, 3)


@pytest.mark.parametrize("t, p, k", [(50, 0.3, 20), (1000, 0.01, 30), (10**5, 0.5, 50_500), (7, 0.9, 7)])
def test_tail_against_scipy(t, p, k):
    assert empirical_event_tail(t, p, k) == pytest.approx(binom.sf(k - 1, t, p), rel=1e-9)


def test_tail_below_hoeffding():
    for t in (10, 100, 1000, 10_000):
        for p in (0.05, 0.3, 0.5, 0.8):
            for eps in (0.01, 0.05, 0.1, 0.2):
                tail = empirical_event_tail(t, p, t * (p + eps))
                assert tail <= math.exp(-2 * t * eps * eps)
