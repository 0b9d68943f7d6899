from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from northcott_lab.curve import INF, Curve, Endomorphism, add, mul, sub
from northcott_lab.heights import (bounded_diff_report, canonical_height,
                                   check_parallelogram, doubling_constant,
                                   doubling_heights, endo_height_check,
                                   form_resultant, gram_lower_bound,
                                   height_pairing, naive_height,
                                   verify_gram_inequality)
from northcott_lab.nf import FieldSpec, designated_sqrt

E1 = Curve.make(0, -7, 10)
P1, P2 = E1.point(1, 2), E1.point(2, 2)

# [DERIVED] h(x(2^10 P)) / 4^10 by a plain Fraction doubling loop; its own tail
# error is at most C / (3 * 4^10) < 5e-6 for these curves.
ORACLE_TAIL = 5e-6
ORACLE = [
    ((0, -7, 10), (1, 2), 0.15707282584656831),
    ((0, -7, 10), (2, 2), 1.0677689743556114),
    ((0, -1, 1), (1, 1), 0.04980843736148224),
    ((0, 0, 17), (-2, 3), 0.4546170375177626),
    ((0, 0, 17), (-1, 4), 1.425104307940178),
    ((0, 0, -2), (3, 5), 1.349576596725103),
    ((0, 100, 0), (20, 100), 0.9497408888591232),
]


@pytest.mark.parametrize("coeffs, xy, value", ORACLE)
def test_canonical_height_against_oracle(coeffs, xy, value):
    C = Curve.make(*coeffs)
    h = canonical_height(C, C.point(*xy))
    assert abs(h.value - value) <= h.radius + ORACLE_TAIL
    assert h.radius < 1e-4


def test_field_path_agrees_with_twisted_rational_point():
    # (2, sqrt 10) on y^2 = x^3 + x is (20, 100) on the twist by 10
    L = FieldSpec.quadratic(10)
    C = Curve.make(0, 1, 0, L)
    h = canonical_height(C, C.point(2, L.gen()))
    assert abs(h.value - ORACLE[-1][2]) <= h.radius + ORACLE_TAIL


def test_cyclotomic_point_agrees_with_rational_model():
    # (4/3, 10 sqrt3 / 9) on y^2 = x^3 + x over Q(zeta_12) is (4, 10) on y^2 = x^3 + 9x
    F = FieldSpec.cyclotomic(12)
    E = Curve.make(0, 1, 0, F)
    P = E.point(Fraction(4, 3), designated_sqrt(F, 3) * Fraction(10, 9))
    h = canonical_height(E, P)
    E9 = Curve.make(0, 9, 0)
    h9 = canonical_height(E9, E9.point(4, 10))
    assert abs(h.value - h9.value) <= h.radius + h9.radius


def test_torsion_heights_are_exact_zero():
    C = Curve.make(0, 0, 1)
    for P in (INF, C.point(-1, 0), C.point(0, 1), C.point(2, 3)):
        h = canonical_height(C, P)
        assert h.exact and h.value == 0.0


def test_naive_height_of_origin_is_zero():
    assert naive_height(E1, INF).is_zero()


def test_radius_monotone_in_tol():
    radii = [canonical_height(E1, P2, tol).radius for tol in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6)]
    assert all(b <= a for a, b in zip(radii, radii[1:]))


def test_unconverged_estimate_is_flagged():
    h = canonical_height(E1, P2, 1e-9)
    assert not h.converged and h.radius > 1e-9


def test_form_resultant_matches_sympy():
    x = sympy.Symbol("x")
    f, g = [3, 0, -2, 5], [1, 4, 7]
    want = sympy.resultant(sympy.Poly(f, x), sympy.Poly(g, x))
    assert form_resultant(f, g) == int(want)


@pytest.mark.parametrize("coeffs, points", [
    ((0, -7, 10), [(1, 2), (2, 2), (3, 4)]),
    ((0, -1, 1), [(1, 1), (0, 1)]),
    ((0, 0, 17), [(-2, 3), (-1, 4), (2, 5)]),
])
def test_doubling_constant_bounds_observed_defects(coeffs, points):
    C = Curve.make(*coeffs)
    bound = doubling_constant(C)
    for xy in points:
        hs = doubling_heights(C, C.point(*xy), 7)
        assert max(abs(b - 4 * a) for a, b in zip(hs, hs[1:])) <= bound


# ---------------------------------------------------------------- identities

ks = st.integers(-2, 2)


@given(ks, ks, ks, ks)
def test_parallelogram_law(a, b, c, d):
    P = add(E1, mul(E1, a, P1), mul(E1, b, P2))
    Q = add(E1, mul(E1, c, P1), mul(E1, d, P2))
    assert check_parallelogram(E1, P, Q).passed


@given(st.integers(-6, 6), st.sampled_from([P1, P2, add(E1, P1, P2)]))
def test_homogeneity(m, P):
    h = canonical_height(E1, P)
    hm = canonical_height(E1, mul(E1, m, P))
    if m == 0:
        assert hm.is_zero()
    else:
        assert abs(hm.value - m * m * h.value) <= hm.radius + m * m * h.radius


def test_pairing_symmetric_and_additive():
    a = height_pairing(E1, P1, P2)
    b = height_pairing(E1, P2, P1)
    assert abs(a.value - b.value) <= a.radius + b.radius
    s = height_pairing(E1, add(E1, P1, P2), P2)
    t = height_pairing(E1, P1, P2) + height_pairing(E1, P2, P2)
    assert abs(s.value - t.value) <= s.radius + t.radius


def test_endomorphism_scaling_on_cm_point():
    F = FieldSpec.cyclotomic(12)
    E = Curve.make(0, 1, 0, F)
    P = E.point(Fraction(4, 3), designated_sqrt(F, 3) * Fraction(10, 9))
    v = endo_height_check(Endomorphism.cm(E, 1, 1), P)
    assert v.passed and v.degree == 2
    assert abs(v.ratio - 2) <= v.ratio_radius


def test_endomorphism_on_torsion_input():
    C = Curve.make(0, 0, 1)
    v = endo_height_check(Endomorphism.scalar(C, 3), C.point(2, 3))
    assert v.torsion_input and v.passed


# ---------------------------------------------------------------- reports and Gram bounds

def test_bounded_diff_report():
    C = Curve.make(0, 0, 1)
    rep = bounded_diff_report(C, [C.point(2, 3)])
    assert rep.rows[0].diff == pytest.approx(math.log(2))
    assert bounded_diff_report(C, []).rows == []
    L = FieldSpec.quadratic(10)
    E = Curve.make(0, 1, 0, L)
    P = E.point(2, L.gen())
    sample = [P]
    for _ in range(3):
        sample.append(add(E, sample[-1], sample[-1]))
    rep = bounded_diff_report(E, sample)
    assert math.isfinite(rep.max_doubling_defect)


def test_gram_bounds():
    single = gram_lower_bound(E1, [P1])
    h = canonical_height(E1, P1)
    assert 0 < single.min_eigenvalue_lower_bound <= h.value
    assert gram_lower_bound(E1, [P1, mul(E1, 2, P1)]).min_eigenvalue_lower_bound <= 0
    g = gram_lower_bound(E1, [P1, P2])
    assert g.independent
    chk = verify_gram_inequality(E1, g, 3)
    assert chk.passed and chk.checked == 49


def test_sub_matches_add_of_negative():
    assert sub(E1, P1, P2) == add(E1, P1, -P2)
