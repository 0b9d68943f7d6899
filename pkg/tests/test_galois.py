from __future__ import annotations

import pytest

from northcott_lab.curve import INF, Curve, Point, add, mul, on_curve, twist
from northcott_lab.galois import (ExtensionSpec, NotInKernelError,
                                  conjugate_point, kernel_iso_check, kernel_test,
                                  trace_map, transfer_inverse, twist_transfer)
from northcott_lab.nf import QQ, Automorphism, FieldSpec, LiteralError

L = FieldSpec.quadratic(10)
EXT = ExtensionSpec.over_q(L)
E = Curve.make(0, 1, 0, L)
P = E.point(2, L.gen())
E1 = Curve.make(0, -7, 10)


def test_extension_literals():
    assert ExtensionSpec.parse("Q(sqrt,10)/Q") == EXT
    sub = ExtensionSpec.parse("Q(zeta,12)/{1,5}")
    assert sub.degree == 2 and str(sub) == "Q(zeta,12)/{1,5}"
    with pytest.raises(LiteralError):
        ExtensionSpec.parse("Q(zeta,12)/{1,6}")
    with pytest.raises(LiteralError):
        ExtensionSpec.parse("Q(zeta,12)/{5,7}")
    with pytest.raises(LiteralError):
        ExtensionSpec.parse("Q(zeta,12)")


def test_conjugation_negates_y_on_kernel_points():
    s = Automorphism(L, -1)
    Q = conjugate_point(E, P, s)
    assert Q == -P and on_curve(E, Q)


def test_trace_values():
    assert trace_map(EXT, E, P).is_infinity
    R = E1.point(1, 2)
    assert trace_map(EXT, E1.lift(L), R.lift(L)) == mul(E1, 2, R).lift(L)


def test_trace_is_a_homomorphism():
    C = E1.lift(L)
    R = E1.point(1, 2).lift(L)
    S = E1.point(2, 2).lift(L)
    lhs = trace_map(EXT, C, add(C, R, S))
    rhs = add(C, trace_map(EXT, C, R), trace_map(EXT, C, S))
    assert lhs == rhs and EXT.point_in_base(lhs)


def test_cyclotomic_trace_lands_in_base():
    F = FieldSpec.cyclotomic(12)
    ext = ExtensionSpec.parse("Q(zeta,12)/{1,5}")
    C = Curve.make(0, 0, 1, F)
    # a point over Q(zeta_12) with x = -zeta_3, y = 0 (2-torsion)
    z3 = F.gen() ** 4
    T = C.point(-z3, 0)
    tr = trace_map(ext, C, T)
    assert ext.point_in_base(tr)


def test_twist_transfer_example():
    img = twist_transfer(EXT, E, P)
    assert img == Curve.make(0, 100, 0).point(20, 100)
    assert transfer_inverse(Curve.make(0, 1, 0), 10, img) == P


def test_transfer_rejects_non_kernel_points():
    with pytest.raises(NotInKernelError):
        twist_transfer(EXT, E1.lift(L), E1.point(1, 2).lift(L))
    assert not kernel_test(EXT, E1.lift(L), E1.point(1, 2).lift(L))


def test_kernel_structure_on_multiples():
    C = Curve.make(0, 1, 0)
    Ed = twist(C, 10)
    for m in range(-3, 4):
        Q = mul(E, m, P)
        assert kernel_test(EXT, E, Q)
        if not Q.is_infinity:
            assert Q.x.is_rational() and (Q.y / L.gen()).is_rational()
        assert on_curve(Ed, twist_transfer(EXT, E, Q))


@pytest.mark.parametrize("sample", [
    [],
    [INF, E.point(0, 0)],
    [P, -P, mul(E, 2, P)],
    [INF, P, -P, mul(E, 2, P), mul(E, 3, P), E.point(0, 0)],
])
def test_kernel_iso_check(sample):
    v = kernel_iso_check(Curve.make(0, 1, 0), 10, sample)
    assert v.passed and v.all_in_kernel


def test_transfer_inverse_validates_input():
    with pytest.raises(ValueError):
        transfer_inverse(Curve.make(0, 1, 0), 10, Point(QQ(1), QQ(1)))
    with pytest.raises(ValueError):
        transfer_inverse(Curve.make(0, 1, 0), 9, INF)
    F = FieldSpec.cyclotomic(12)
    with pytest.raises(ValueError):
        twist_transfer(ExtensionSpec.over_q(F), Curve.make(0, 1, 0, F), INF)
