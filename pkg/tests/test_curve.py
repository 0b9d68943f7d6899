from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from northcott_lab.curve import (INF, Curve, Endomorphism, NotOnCurveError,
                                 SingularCurveError, add, division_polynomial,
                                 double_x, endo_eval, iota, mul, on_curve,
                                 shift_curve, small_order, torsion_points,
                                 torsion_test, twist, twist_map)
from northcott_lab.nf import QQ, FieldSpec, LiteralError, designated_sqrt

E1 = Curve.make(0, -7, 10)
P1, P2 = E1.point(1, 2), E1.point(2, 2)
C12 = FieldSpec.cyclotomic(12)
ks = st.integers(-3, 3)


def test_curve_literals():
    C = Curve.parse("0,-7,10 over Q")
    assert C == E1 and str(C) == "0,-7,10 over Q"
    L = Curve.parse("1/2,0,1+sqrt over Q(sqrt,10)")
    assert L.field == FieldSpec.quadratic(10)
    assert Curve.parse("0,1,0 over Q(zeta,12)").field == C12
    assert C.parse_point("inf") is INF
    assert C.parse_point("(1,-2)") == -P1


@pytest.mark.parametrize("text", ["0,1 over Q", "0,0,0 over Q", "0,x,0 over Q", "0,1,0 over Q(cbrt,2)"])
def test_bad_curve_literals(text):
    with pytest.raises(LiteralError):
        Curve.parse(text)


def test_bad_points():
    with pytest.raises(LiteralError):
        E1.parse_point("(1,3)")
    with pytest.raises(LiteralError):
        E1.parse_point("(1,2")
    with pytest.raises(NotOnCurveError):
        E1.point(0, 0)
    with pytest.raises(SingularCurveError):
        Curve.make(0, 0, 0)


# ---------------------------------------------------------------- group law

@given(ks, ks, ks, ks, ks, ks)
def test_associativity_and_commutativity(a, b, c, d, e, f):
    P = add(E1, mul(E1, a, P1), mul(E1, b, P2))
    Q = add(E1, mul(E1, c, P1), mul(E1, d, P2))
    R = add(E1, mul(E1, e, P1), mul(E1, f, P2))
    assert add(E1, add(E1, P, Q), R) == add(E1, P, add(E1, Q, R))
    assert add(E1, P, Q) == add(E1, Q, P)
    assert on_curve(E1, add(E1, P, Q))


@given(st.integers(-8, 8))
def test_mul_is_repeated_addition(m):
    acc = INF
    for _ in range(abs(m)):
        acc = add(E1, acc, P1 if m > 0 else -P1)
    assert mul(E1, m, P1) == acc


def test_double_x_matches_group_law():
    for P in (P1, P2, add(E1, P1, P2)):
        assert double_x(E1, P.x) == add(E1, P, P).x
    assert double_x(Curve.make(0, -1, 0), QQ(0)) is None


def test_inverse_and_identity():
    assert add(E1, P1, -P1).is_infinity
    assert add(E1, INF, P1) == P1


# ---------------------------------------------------------------- division polynomials

@pytest.mark.parametrize("coeffs", [(0, 1, 0), (0, -1, 0), (0, 0, 1), (0, -7, 10), (1, -2, 3)])
@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_m_torsion_count_is_m_squared(coeffs, m):
    dp = division_polynomial(Curve.make(*coeffs), m)
    assert dp.count_qbar_points() == m * m
    assert dp.f.degree == dp.expected_degree()


def test_division_polynomial_roots_are_torsion():
    # [DERIVED] psi_3 of y^2 = x^3 + 1 is 3x^4 + 12x = 3x(x^3 + 4)
    C = Curve.make(0, 0, 1)
    f3 = division_polynomial(C, 3).f
    assert [c.to_fraction() for c in f3.coeffs] == [0, 12, 0, 0, 3]


@pytest.mark.parametrize("coeffs, m, F, size", [
    ((0, 1, 0), 2, QQ, 2), ((0, -1, 0), 2, QQ, 4), ((0, 0, 1), 2, QQ, 2), ((0, 0, 1), 3, QQ, 3),
    ((0, 1, 0), 3, QQ, 1), ((0, 1, 0), 2, C12, 4), ((0, 0, 1), 2, C12, 4), ((0, 0, 1), 3, C12, 3),  # x^3 = -4 has no root in Q(zeta_12)
])
def test_torsion_sets(coeffs, m, F, size):
    ts = torsion_points(Curve.make(*coeffs, F), m)
    assert len(ts) == size and ts.complete
    for P in ts:
        assert mul(Curve.make(*coeffs, F), m, P).is_infinity


# ---------------------------------------------------------------- twists, shifts, endomorphisms

def test_twist_and_twist_map():
    C = Curve.make(0, 1, 0)
    E10 = twist(C, 10)
    assert (E10.a, E10.b, E10.c) == (QQ(0), QQ(100), QQ(0))
    L = FieldSpec.quadratic(10)
    P = Curve.make(0, 1, 0, L).point(2, L.gen())
    Q = twist_map(C.lift(L), 10, P, L)
    assert on_curve(twist(C.lift(L), 10), Q)


def test_shift_is_an_isomorphism():
    C = Curve.make(0, -7, 10)
    Ck, iso = shift_curve(C, 3)
    for P in (P1, P2, add(C, P1, P2)):
        assert on_curve(Ck, iso(P))
    assert iso(add(C, P1, P2)) == add(Ck, iso(P1), iso(P2))


def test_cm_endomorphisms():
    E = Curve.make(0, 1, 0, C12)
    r3 = designated_sqrt(C12, 3)
    P = E.point(Fraction(4, 3), r3 * Fraction(10, 9))
    f = Endomorphism.cm(E, 1, 1)
    g = Endomorphism.cm(E, 1, -1)
    assert f.degree == 2 and g.compose(f) == Endomorphism.cm(E, 2, 0)
    assert endo_eval(g, endo_eval(f, P)) == mul(E, 2, P)
    assert iota(E, iota(E, P)) == -P
    assert Endomorphism.parse(E, "1+i") == f and Endomorphism.parse(E, "[3]").degree == 9
    with pytest.raises(ValueError):
        Endomorphism.cm(E1, 1, 1)


def test_torsion_test_verdicts():
    C = Curve.make(0, 0, 1)
    assert small_order(C, C.point(2, 3), 10) == 6
    assert torsion_test(C, C.point(2, 3)).order == 6
    v = torsion_test(E1, P1)
    assert v.kind == "non_torsion" and v.lower_bound > 0.15
