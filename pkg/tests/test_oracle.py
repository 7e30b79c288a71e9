from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from jadelab.oracle import check_lemma1, empirical_vs_exact, enumerate_q0_q1, exact_q0_q1

P_HAT = 1 / 24


def fraction_q0_q1(pv):
    """Exact rational reference over all transmit patterns."""
    pv = [Fraction(x) for x in pv]
    q0 = q1 = Fraction(0)
    for pattern in product((0, 1), repeat=len(pv)):
        w = Fraction(1)
        for p, b in zip(pv, pattern):
            w *= p if b else 1 - p
        if sum(pattern) == 0:
            q0 += w
        elif sum(pattern) == 1:
            q1 += w
    return q0, q1


def test_single_node():
    assert exact_q0_q1([0.5]) == (0.5, 0.5)


def test_two_at_cap():
    q0, q1 = exact_q0_q1([P_HAT, P_HAT])
    assert q0 == pytest.approx((23 / 24) ** 2, abs=1e-15)
    assert q1 == pytest.approx(2 * (1 / 24) * (23 / 24), abs=1e-15)
    assert (round(q0, 6), round(q1, 6)) == (0.918403, 0.079861)


def test_empty_vector():
    assert exact_q0_q1([]) == (1.0, 0.0)
    rep = empirical_vs_exact([], trials=10)
    assert rep["q0_sim"] == 1.0 and rep["q1_sim"] == 0.0


def test_matches_rational_reference():
    pv = [1 / 24, 1 / 30, 1 / 100, 0.02, 1 / 26.4]
    q0, q1 = fraction_q0_q1(pv)
    e0, e1 = exact_q0_q1(pv)
    assert abs(e0 - float(q0)) <= 1e-15 and abs(e1 - float(q1)) <= 1e-15


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-6, 0.999), min_size=1, max_size=16))
def test_exact_matches_enumeration(pv):
    a = exact_q0_q1(pv)
    b = enumerate_q0_q1(pv)
    assert abs(a[0] - b[0]) <= 1e-12 and abs(a[1] - b[1]) <= 1e-12


def test_lemma1_tight_cases():
    q0, q1 = exact_q0_q1([P_HAT, P_HAT])
    assert check_lemma1([P_HAT, P_HAT], P_HAT)
    assert q1 == pytest.approx(q0 * (2 * P_HAT) / (1 - P_HAT), rel=1e-14)
    q0, q1 = exact_q0_q1([P_HAT])
    assert check_lemma1([P_HAT], P_HAT)
    assert q1 == pytest.approx(q0 * P_HAT / (1 - P_HAT), rel=1e-14)


def test_lemma1_precondition():
    with pytest.raises(ValueError):
        check_lemma1([0.05], P_HAT)
    with pytest.raises(ValueError):
        exact_q0_q1([0.0])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(1e-9, P_HAT), min_size=1, max_size=20))
def test_lemma1_property(pv):
    assert check_lemma1(pv, P_HAT)


def test_empirical_small_run_well_formed():
    rep = empirical_vs_exact([P_HAT, P_HAT], trials=1, seed=3)
    assert rep["trials"] == 1
    assert rep["q0_sim"] in (0.0, 1.0) and rep["q1_sim"] in (0.0, 1.0)
    assert rep["q0_se"] > 0.2


def test_empirical_deterministic():
    assert empirical_vs_exact([0.1, 0.2], 5000, seed=2) == empirical_vs_exact([0.1, 0.2], 5000, seed=2)


def test_empirical_agrees_moderate():
    rep = empirical_vs_exact([0.1, 0.2, 0.3], 50_000, seed=4)
    assert rep["q0_within_3se"] and rep["q1_within_3se"]
