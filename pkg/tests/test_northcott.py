from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from northcott_lab.curve import INF, Curve, on_curve
from northcott_lab.heights import naive_height
from northcott_lab.nf import QQ, FieldSpec, UnsupportedFieldError
from northcott_lab.northcott import (SearchBox, cc_points_demo, enumerate_bounded,
                                     kab_holds, kab_min_k, mult_dep_test,
                                     mult_dep_witness, qtr_family)
from northcott_lab.verify import enumeration_csv, oracle_csv


def brute(a: int, b: int, c: int, T: float) -> set:
    """Every rational point with h(x) <= T, by a double loop."""
    H = math.floor(math.exp(T) * (1 + 1e-12))
    out = set()
    for q in range(1, H + 1):
        for p in range(-H, H + 1):
            if math.gcd(p, q) != 1:
                continue
            x = Fraction(p, q)
            v = x ** 3 + a * x * x + b * x + c
            if v < 0:
                continue
            n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
            if n * n == v.numerator and d * d == v.denominator:
                out |= {(x, Fraction(n, d)), (x, -Fraction(n, d))}
    return out


def as_set(pts) -> set:
    return {(P.x.to_fraction(), P.y.to_fraction()) for P in pts if not P.is_infinity}


@pytest.mark.parametrize("coeffs, T", [((0, 1, 0), math.log(6)), ((0, -1, 0), math.log(6)),
                                       ((0, -7, 10), math.log(12)), ((0, 0, 17), math.log(30)),
                                       ((1, -2, 1), math.log(20))])
def test_enumeration_equals_brute_force(coeffs, T):
    pts = enumerate_bounded(Curve.make(*coeffs), QQ, T)
    assert pts[0] is INF
    assert as_set(pts) == brute(*coeffs, T)


@given(st.integers(-3, 3), st.integers(-6, 6), st.integers(-6, 6), st.floats(0, math.log(9)))
def test_enumeration_property(a, b, c, T):
    assume(4 * a ** 3 * c - a * a * b * b - 18 * a * b * c + 4 * b ** 3 + 27 * c * c != 0)
    assert as_set(enumerate_bounded(Curve.make(a, b, c), QQ, T)) == brute(a, b, c, T)


def test_csv_byte_equality_with_oracle():
    for b in (1, -1):
        assert enumeration_csv(Curve.make(0, b, 0), math.log(6)) == oracle_csv(0, b, 0, math.log(6))
    C = Curve.make(0, -7, 10)
    assert enumeration_csv(C, math.log(12)) == oracle_csv(0, -7, 10, math.log(12))


def test_enumeration_order_and_heights():
    pts = enumerate_bounded(Curve.make(0, -7, 10), QQ, math.log(5))
    hs = [naive_height(Curve.make(0, -7, 10), P).value for P in pts]
    assert hs == sorted(hs) and max(hs) <= math.log(5) + 1e-12


def test_height_bound_keeps_boundary():
    assert SearchBox.for_height(math.log(6)).H == 6
    assert Fraction(6) in set(SearchBox.for_height(math.log(6)).rationals())


def test_quadratic_enumeration():
    L = FieldSpec.quadratic(10)
    pts = enumerate_bounded(Curve.make(0, 1, 0), L, math.log(2))
    C = Curve.make(0, 1, 0, L)
    assert C.point(2, L.gen()) in pts
    assert all(on_curve(C, P) for P in pts)
    assert all(naive_height(C, P).value <= math.log(2) + 1e-9 for P in pts)


def test_cyclotomic_enumeration_is_rejected():
    with pytest.raises(UnsupportedFieldError):
        enumerate_bounded(Curve.make(0, 1, 0), FieldSpec.cyclotomic(5), 1.0)


# ---------------------------------------------------------------- kab threshold

def test_kab_example():
    assert kab_min_k(0, 1) == 8
    assert kab_holds(8, 0, 1) and not kab_holds(7, 0, 1)


@given(st.fractions(-50, 50, max_denominator=4), st.fractions(-50, 50, max_denominator=4))
def test_kab_minimality(a, b):
    assume(4 * a ** 3 + 27 * b * b != 0)
    k = kab_min_k(a, b)
    assert kab_holds(k, a, b)
    assert all(not kab_holds(j, a, b) for j in range(1, k))


# ---------------------------------------------------------------- totally real family

# [DERIVED] sympy.minimal_polynomial(2*cos(2*pi/n)) for n = 5, 7, 11
FAMILY_MINPOLYS = {5: (1, 1, -1), 7: (1, 1, -2, -1), 11: (1, 1, -4, -3, 3, 1)}


def test_qtr_family_small():
    rec = qtr_family(0, 1, 8, 3)
    assert rec.conductors == (5, 7, 11)
    for p in rec.points:
        assert p.minpoly.coefficients == FAMILY_MINPOLYS[p.n]
        assert p.bound_ok and p.totally_positive
        assert p.h.upper <= math.log(2)
    assert rec.distinct


def test_qtr_family_threshold_error():
    with pytest.raises(ValueError, match="fails the threshold"):
        qtr_family(0, 1, 7, 2)


# ---------------------------------------------------------------- multiplicative dependence

def brute_dependent(x: Fraction, y: Fraction, bound: int = 20) -> bool:
    return any(x ** m * y ** n == 1 for m in range(-bound, bound + 1)
               for n in range(-bound, bound + 1) if (m, n) != (0, 0))


small_prime_products = st.builds(
    lambda s, e2, e3, e5: s * Fraction(2) ** e2 * Fraction(3) ** e3 * Fraction(5) ** e5,
    st.sampled_from([1, -1]), st.integers(-2, 2), st.integers(-2, 2), st.integers(-1, 1))


@given(small_prime_products, small_prime_products)
def test_mult_dep_against_brute_force(x, y):
    assert mult_dep_test(x, y) == brute_dependent(x, y, 8)


@pytest.mark.parametrize("x, y, dep", [(4, 8, True), (2, 3, False), (-1, 1, True), (Fraction(1, 4), 8, True)])
def test_mult_dep_examples(x, y, dep):
    assert mult_dep_test(x, y) is dep
    w = mult_dep_witness(x, y)
    if dep:
        m, n = w
        assert Fraction(x) ** m * Fraction(y) ** n == 1 and (m, n) != (0, 0)
    else:
        assert w is None


def test_cc_points_demo():
    rows = cc_points_demo([2, 3, 5])
    assert [str(r.field) for r in rows[::2]] == ["Q(sqrt,10)", "Q(sqrt,30)", "Q(sqrt,130)"]
    for r in rows:
        assert r.on_curve
        assert r.h.value == pytest.approx(math.log(r.p), abs=1e-12)
    with pytest.raises(ValueError):
        cc_points_demo([4])
