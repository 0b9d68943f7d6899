from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from northcott_lab.curve import INF, Curve, Endomorphism, add, mul
from northcott_lab.dynamics import (BackChain, back_chain, calibrate_B, classify_preperiodic,
                                    decay_check, height_growth_check, orbit, preimages_double)
from northcott_lab.heights import naive_height
from northcott_lab.nf import FieldSpec

E1 = Curve.make(0, -7, 10)
P1, P2 = E1.point(1, 2), E1.point(2, 2)
TWO = Endomorphism.scalar(E1, 2)


def test_orbit_of_torsion_point_cycles():
    C = Curve.make(0, -1, 0)
    rec = orbit(Endomorphism.scalar(C, 2), C.point(1, 0))
    assert rec.preperiodic and rec.cycle_start == 1 and rec.period == 1
    assert rec.iterates == [C.point(1, 0), INF]


def test_orbit_of_wandering_point_truncates():
    rec = orbit(TWO, P1, max_iter=5)
    assert rec.truncated and not rec.preperiodic
    assert len(rec.iterates) == 6
    assert rec.iterates[-1] == mul(E1, 32, P1)
    hs = [h.value for h in rec.heights]
    assert all(b > a for a, b in zip(hs[1:], hs[2:]))


def test_orbit_rejects_constant_map():
    with pytest.raises(ValueError):
        orbit(Endomorphism.scalar(E1, 0), P1)


def test_classify():
    C = Curve.make(0, 0, 1)
    assert classify_preperiodic(Endomorphism.scalar(C, 2), C.point(2, 3)) == "Preperiodic"
    assert classify_preperiodic(TWO, P1) == "Wandering"
    with pytest.raises(ValueError):
        classify_preperiodic(Endomorphism.scalar(E1, 1), P1)


def test_cm_map_classification():
    F = FieldSpec.cyclotomic(4)
    C = Curve.make(0, 1, 0, F)
    f = Endomorphism.parse(C, "1+i")
    assert f.degree == 2
    assert classify_preperiodic(f, C.point(0, 0)) == "Preperiodic"


@pytest.mark.parametrize("k", [1, 2, 3, -1, 5])
def test_preimages_double_contains_halves(k):
    P = mul(E1, k, add(E1, P1, P2))
    halves = preimages_double(E1, mul(E1, 2, P)).points
    assert P in halves
    assert all(mul(E1, 2, Q) == mul(E1, 2, P) for Q in halves)


def test_preimages_of_infinity_are_two_torsion():
    C = Curve.make(0, -1, 0)
    pre = preimages_double(C, INF)
    assert pre.complete and len(pre.points) == 4


def test_back_chain_of_four_p():
    chain = back_chain(TWO, mul(E1, 4, P1), 6)
    assert chain.chain[:3] == [mul(E1, 4, P1), mul(E1, 2, P1), P1]
    assert chain.forward_consistent()
    assert chain.complete_search
    assert decay_check(chain).passed


def test_back_chain_stops_on_indivisible_point():
    chain = back_chain(TWO, P1, 4)
    assert chain.length == 0 and chain.stopped_early


def test_back_chain_needs_doubling():
    with pytest.raises(ValueError):
        back_chain(Endomorphism.scalar(E1, 3), P1, 2)


@given(st.integers(1, 3), st.integers(-2, 2), st.integers(-2, 2))
def test_from_forward_chain_decays(steps, a, b):
    Q = add(E1, mul(E1, a, P1), mul(E1, b, P2))
    chain = BackChain.from_forward(TWO, Q, steps)
    assert chain.forward_consistent()
    assert decay_check(chain).passed


def test_growth_example():
    L = FieldSpec.quadratic(10)
    C = Curve.make(0, 1, 0, L)
    f = Endomorphism.scalar(C, 2)
    v = height_growth_check(f, C.point(2, L.gen()), 3, 0.1)
    assert v.g == 3.5 and not v.vacuous and v.passed
    assert len(v.heights) == 4


def test_growth_vacuous_case():
    v = height_growth_check(TWO, P1, 3, 10.0)
    assert v.vacuous and v.passed and v.heights == [pytest.approx(0.0)]


def test_calibrate_B_is_an_upper_bound():
    sample = [(TWO, mul(E1, k, P1)) for k in (1, 2, 3)]
    B = calibrate_B(sample)
    for f, Q in sample:
        gap = naive_height(E1, mul(E1, 2, Q)).value - 4 * naive_height(E1, Q).value
        assert abs(gap) <= B
    with pytest.raises(ValueError):
        calibrate_B([])


def test_finitely_many_preperiodic_points_of_bounded_height():
    # every point of y^2 = x^3 - x with h <= log 10 is torsion, and there are four
    from northcott_lab.northcott import enumerate_bounded
    from northcott_lab.nf import QQ
    C = Curve.make(0, -1, 0)
    pts = enumerate_bounded(C, QQ, math.log(10))
    f = Endomorphism.scalar(C, 2)
    assert len(pts) == 4
    assert {classify_preperiodic(f, P) for P in pts} == {"Preperiodic"}
