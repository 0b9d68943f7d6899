from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import coords
from northcott_lab.nf import (QQ, Automorphism, FieldSpec, LiteralError,
                              apply_auto, charpoly, cyclotomic_poly, designated_sqrt,
                              embeddings, euler_phi, galois_orbit, house,
                              is_root_of_unity, minimal_polynomial, mobius,
                              parse_element, sqrt_in_field, squarefree_part,
                              trace, weil_height)

Q5 = FieldSpec.quadratic(5)
Q2 = FieldSpec.quadratic(2)
QM3 = FieldSpec.quadratic(-3)
C5 = FieldSpec.cyclotomic(5)
C7 = FieldSpec.cyclotomic(7)
C8 = FieldSpec.cyclotomic(8)
C12 = FieldSpec.cyclotomic(12)
FIELDS = [QQ, Q2, QM3, C5, C8, C12]


field_elements = st.sampled_from(FIELDS).flatmap(
    lambda F: coords(F.degree).map(lambda cs: F.element(cs)))


# ---------------------------------------------------------------- literals

@pytest.mark.parametrize("text, kind, param", [
    ("Q", "rational", 0), ("Q(sqrt,10)", "quadratic", 10), ("Q(sqrt,-1)", "quadratic", -1),
    ("Q(zeta,12)", "cyclotomic", 12), (" Q( zeta , 5 ) ", "cyclotomic", 5),
])
def test_field_literals(text, kind, param):
    F = FieldSpec.parse(text)
    assert (F.kind, F.param) == (kind, param)
    assert FieldSpec.parse(str(F)) == F


@pytest.mark.parametrize("text, pos", [("R", 0), ("Q(sqrt,4)", 7), ("Q(zeta,2)", 7), ("Q(cbrt,2)", 2)])
def test_bad_field_literals_report_position(text, pos):
    with pytest.raises(LiteralError) as info:
        FieldSpec.parse(text)
    assert info.value.position == pos


def test_element_literals_round_trip():
    for text, F in [("3/4", QQ), ("1/2+3/5*sqrt", Q5), ("-sqrt", Q5), ("[1,0,-2/3,0]", C12)]:
        a = parse_element(text, F)
        assert parse_element(str(a), F) == a


def test_malformed_element_literal_position():
    with pytest.raises(LiteralError) as info:
        parse_element("1/2+3/*sqrt", Q5)
    assert info.value.position > 0
    with pytest.raises(LiteralError):
        parse_element("[1,2]", C12)


# ---------------------------------------------------------------- arithmetic

def test_small_identities():
    r2 = Q2.gen()
    assert (1 + r2) * (1 - r2) == QQ(-1).lift(Q2)
    z = C12.gen()
    assert z ** 12 == C12.one()
    assert z ** 6 == -C12.one()
    assert C12.imaginary_unit() ** 2 == -C12.one()
    assert C5.gen() ** 5 == C5.one()


@given(st.sampled_from(FIELDS).flatmap(
    lambda F: st.tuples(coords(F.degree), coords(F.degree)).map(
        lambda p: (F.element(p[0]), F.element(p[1])))))
def test_ring_axioms(pair):
    a, b = pair
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + a) == a * b + a * a
    assert (a - b) + b == a


@given(field_elements)
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
        return
    assert a * a.inverse() == a.field.one()
    assert (a / a) == a.field.one()


@given(field_elements)
def test_trace_is_sum_of_conjugates(a):
    total = sum((apply_auto(s, a) for s in map(lambda k: Automorphism(a.field, k),
                                                   a.field.group_exponents())), a.field.zero())
    assert total.is_rational()
    assert total.to_fraction() == trace(a)


def test_trace_of_roots_of_unity_is_mobius():
    for n in (3, 4, 5, 8, 9, 12, 15):
        assert trace(FieldSpec.cyclotomic(n).gen()) == mobius(n)


def test_number_theory_helpers():
    assert [euler_phi(n) for n in (1, 5, 8, 12, 105)] == [1, 4, 4, 4, 48]
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    assert squarefree_part(-12) == -3 and squarefree_part(72) == 2


# ---------------------------------------------------------------- embeddings

@given(coords(4))
def test_embeddings_match_direct_evaluation(cs):
    a = C12.element(cs)
    got = sorted((complex(b.center) for b in embeddings(a, 1e-25)), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    want = []
    for k in C12.group_exponents():
        w = cmath.exp(2j * math.pi * k / 12)
        want.append(sum(float(c) * w ** j for j, c in enumerate(cs)))
    want.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    for g, w in zip(got, want):
        assert abs(g - w) < 1e-9


def test_house():
    z = C8.gen()
    h = house(z + z.inverse())
    assert abs(h.value - math.sqrt(2)) <= h.radius + 1e-15


# ---------------------------------------------------------------- minimal polynomials
# [DERIVED] frozen from sympy.minimal_polynomial

MINPOLYS = [
    (lambda: C7.element([0, 1, 0, 0, 0, 0, 1]), (1, 1, -2, -1)),
    (lambda: C5.element([1, 1, 0, 2]), (1, -1, 6, 4, 1)),
    (lambda: Q5.element([Fraction(1, 2), Fraction(1, 2)]), (1, -1, -1)),
    (lambda: C12.element([Fraction(1, 2), 1, 0, 0]), (16, -32, 8, 8, 13)),
    (lambda: QM3.element([Fraction(3, 2), Fraction(1, 5)]), (100, -300, 237)),
    (lambda: C8.element([0, 1, 0, Fraction(1, 3)]), (81, 0, 108, 0, 100)),
]


@pytest.mark.parametrize("make, coeffs", MINPOLYS)
def test_minimal_polynomial(make, coeffs):
    mp = minimal_polynomial(make())
    assert mp.coefficients == coeffs
    assert mp(make()).is_zero()


@given(field_elements)
def test_charpoly_annihilates(a):
    cp = charpoly(a)
    acc = a.field.zero()
    for c in reversed(cp):
        acc = acc * a + a.field(c)
    assert acc.is_zero()
    assert len(cp) == a.field.degree + 1


# ---------------------------------------------------------------- heights
# [DERIVED] log(Mahler measure)/degree from mpmath.polyroots on the sympy minpoly

HEIGHTS = [
    (MINPOLYS[0][0], 0.26986230534823757085),
    (MINPOLYS[1][0], 0.4812118250596034475),
    (MINPOLYS[2][0], 0.24060591252980172375),
    (MINPOLYS[3][0], 0.88053206043324333163),
    (MINPOLYS[4][0], 2.7340300705675655928),
    (MINPOLYS[5][0], 1.151292546497022842),
]


@pytest.mark.parametrize("make, value", HEIGHTS)
def test_weil_height_matches_mahler_measure(make, value):
    h = weil_height(make())
    assert abs(h.value - value) <= h.radius + 1e-15
    assert h.radius < 1e-10


def test_weil_height_rational_and_exact_zeros():
    assert weil_height(QQ(Fraction(-7, 3))).value == pytest.approx(math.log(7), abs=1e-15)
    for a in (QQ(0), QQ(1), QQ(-1), C12.gen(), C12.gen() ** 5, C8.gen(), QM3.element([Fraction(1, 2), Fraction(1, 2)])):
        h = weil_height(a)
        assert h.exact and h.value == 0.0
    assert is_root_of_unity(C12.imaginary_unit())
    assert not is_root_of_unity(C12.gen() + 1 + C12.gen() ** 3)


@given(field_elements)
def test_height_inversion_and_powers(a):
    if a.is_zero():
        assert weil_height(a).is_zero()
        return
    h = weil_height(a)
    hi = weil_height(a.inverse())
    assert abs(h.value - hi.value) <= h.radius + hi.radius
    h3 = weil_height(a ** 3)
    assert abs(h3.value - 3 * h.value) <= h3.radius + 3 * h.radius


@given(coords(4))
def test_height_invariant_under_roots_of_unity(cs):
    a = C12.element(cs)
    b = a * C12.gen() ** 5
    ha, hb = weil_height(a), weil_height(b)
    assert abs(ha.value - hb.value) <= ha.radius + hb.radius


@given(coords(4))
def test_height_constant_on_galois_orbit(cs):
    a = C12.element(cs)
    h = weil_height(a)
    for c in galois_orbit(a):
        hc = weil_height(c)
        assert abs(hc.value - h.value) <= h.radius + hc.radius


# ---------------------------------------------------------------- square roots

@given(field_elements)
def test_sqrt_of_square(a):
    r = sqrt_in_field(a * a)
    assert r is not None and r * r == a * a


def test_non_squares_and_designated_roots():
    assert sqrt_in_field(QQ(2)) is None
    assert sqrt_in_field(Q5.gen()) is None
    s3 = designated_sqrt(C12, 3)
    assert s3 * s3 == C12(3)
    ball = embeddings(s3, 1e-20)[0]  # identity embedding, zeta -> exp(2 pi i / 12)
    assert abs(complex(ball.center) - math.sqrt(3)) < 1e-15
    assert designated_sqrt(Q2, 8) == 2 * Q2.gen()
