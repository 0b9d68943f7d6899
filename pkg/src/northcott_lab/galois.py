"""Galois conjugation of points, trace maps and the quadratic-twist transfer."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curve import INF, Curve, Point, add, on_curve, twist
from .nf import (QQ, AlgNumber, Automorphism, FieldSpec, LiteralError,
                 apply_auto, designated_sqrt, squarefree_part)


class NotInKernelError(ValueError):
    pass


@dataclass(frozen=True)
class ExtensionSpec:
    """``L/F`` with ``F`` the fixed field of the listed exponents of Gal(L/Q)."""

    L: FieldSpec
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.L.kind == "rational":
            raise ValueError("L must be quadratic or cyclotomic")
        allowed = set(self.L.group_exponents())
        norm = tuple(sorted({self._reduce(k) for k in self.exponents}))
        if not set(norm) <= allowed:
            raise ValueError(f"exponents {norm} are not automorphisms of {self.L}")
        if self._reduce(1) not in norm:
            raise ValueError("subgroup must contain the identity")
        for j in norm:
            for k in norm:
                if self._reduce(j * k) not in norm:
                    raise ValueError(f"exponents {norm} are not closed under composition")
        object.__setattr__(self, "exponents", norm)

    def _reduce(self, k: int) -> int:
        return k % self.L.param if self.L.kind == "cyclotomic" else (1 if k > 0 else -1)

    @classmethod
    def over_q(cls, L: FieldSpec) -> ExtensionSpec:
        return cls(L, tuple(L.group_exponents()))

    @classmethod
    def parse(cls, text: str) -> ExtensionSpec:
        top, sep, base = text.partition("/")
        if not sep:
            raise LiteralError(text, len(text), "extension literal needs 'L/F'")
        L = FieldSpec.parse(top)
        base = base.strip()
        off = text.index("/") + 1
        if base == "Q":
            return cls.over_q(L)
        m = re.fullmatch(r"\{\s*([+-]?\d+(?:\s*,\s*[+-]?\d+)*)\s*\}", base)
        if not m:
            raise LiteralError(text, off, "base must be Q or {k1,k2,...}")
        ks = tuple(int(t) for t in m.group(1).split(","))
        try:
            return cls(L, ks)
        except ValueError as exc:
            raise LiteralError(text, off, str(exc)) from None

    @property
    def automorphisms(self) -> list[Automorphism]:
        return [Automorphism(self.L, k) for k in self.exponents]

    @property
    def degree(self) -> int:
        return len(self.exponents)

    def in_base(self, a: AlgNumber) -> bool:
        return all(apply_auto(s, a) == a for s in self.automorphisms)

    def point_in_base(self, P: Point) -> bool:
        return P.is_infinity or (self.in_base(P.x) and self.in_base(P.y))

    def __str__(self) -> str:
        if set(self.exponents) == set(self.L.group_exponents()):
            return f"{self.L}/Q"
        return f"{self.L}/{{{','.join(map(str, self.exponents))}}}"


def _curve_fixed(C: Curve, sigma: Automorphism) -> bool:
    return all(apply_auto(sigma, v) == v for v in (C.a, C.b, C.c))


def conjugate_point(C: Curve, P: Point, sigma: Automorphism) -> Point:
    """``P^sigma``; the curve must be stable under ``sigma``."""
    if not _curve_fixed(C, sigma):
        raise ValueError(f"curve not stable under {sigma}")
    if P.is_infinity:
        return P
    return Point(apply_auto(sigma, P.x.lift(sigma.field)), apply_auto(sigma, P.y.lift(sigma.field)))


def trace_map(ext: ExtensionSpec, C: Curve, P: Point) -> Point:
    CL = C.lift(ext.L)
    for s in ext.automorphisms:
        if not _curve_fixed(CL, s):
            raise ValueError("curve is not defined over the base field")
    if not on_curve(CL, P):
        raise ValueError("point not on curve")
    total = INF
    for s in ext.automorphisms:
        total = add(CL, total, conjugate_point(CL, P, s))
    if not ext.point_in_base(total):
        raise ArithmeticError("trace landed outside the base field")
    return total


def kernel_test(ext: ExtensionSpec, C: Curve, P: Point) -> bool:
    return trace_map(ext, C, P).is_infinity


# --------------------------------------------------------------------------
# quadratic twist transfer


def _split_d(d) -> tuple[Fraction, FieldSpec, AlgNumber]:
    """Return (d, Q(sqrt d), designated sqrt d) for a rational non-square d."""
    dq = Fraction(d.to_fraction() if isinstance(d, AlgNumber) else d)
    if dq == 0:
        raise ValueError("d must be nonzero")
    num = dq.numerator * dq.denominator  # same square class as d
    s = squarefree_part(num)
    if s == 1:
        raise ValueError(f"{dq} is a square; the twist is trivial")
    L = FieldSpec.quadratic(s)
    return dq, L, designated_sqrt(L, L(dq))


def _base_curve(C: Curve) -> Curve:
    if not C.is_rational():
        raise ValueError("twist transfer needs a curve defined over Q")
    return C.lift(QQ)


def twist_transfer(ext: ExtensionSpec, C: Curve, P: Point) -> Point:
    """Map a zero-trace point ``(alpha, gamma sqrt d)`` of ``E(F(sqrt d))`` to
    ``(d alpha, d^2 gamma)`` on ``E_d(F)`` with ``F = Q``."""
    if ext.L.kind != "quadratic" or ext.degree != 2:
        raise ValueError("twist transfer needs a quadratic extension over Q")
    E = _base_curve(C)
    d, L, r = _split_d(ext.L.param)
    if not kernel_test(ext, C, P):
        raise NotInKernelError(f"{P} has nonzero trace")
    Ed = twist(E, d)
    if P.is_infinity:
        return INF
    alpha = P.x.lift(L)
    gamma = P.y.lift(L) / r
    if not (alpha.is_rational() and gamma.is_rational()):
        raise ArithmeticError("kernel point does not have the (alpha, gamma sqrt d) shape")
    out = Point(QQ(d * alpha.to_fraction()), QQ(d * d * gamma.to_fraction()))
    if not on_curve(Ed, out):
        raise ArithmeticError("transfer image failed the twisted equation")
    return out


def transfer_inverse(C: Curve, d, Q: Point) -> Point:
    """``(x, y) -> (x / d, y sqrt(d) / d^2)`` from ``E_d(Q)`` into ``E(Q(sqrt d))``."""
    E = _base_curve(C)
    dq, L, r = _split_d(d)
    Ed = twist(E, dq)
    if not on_curve(Ed, Q):
        raise ValueError(f"{Q} is not on the twist by {dq}")
    if Q.is_infinity:
        return INF
    x = Q.x.to_fraction() / dq
    y = r * (Q.y.to_fraction() / (dq * dq))
    P = Point(L(x), y)
    if not on_curve(E.lift(L), P):
        raise ArithmeticError("inverse transfer failed the curve equation")
    return P


@dataclass(frozen=True)
class IsoVerdict:
    passed: bool
    injective: bool
    homomorphism: bool
    round_trip: bool
    all_in_kernel: bool
    pairs_checked: int


def kernel_iso_check(C: Curve, d, sample: Sequence[Point]) -> IsoVerdict:
    """Transfer is injective, additive and inverted by ``transfer_inverse`` on
    ``sample`` (all pairwise sums included)."""
    dq, L, _ = _split_d(d)
    ext = ExtensionSpec.over_q(L)
    CL = _base_curve(C).lift(L)
    Ed = twist(_base_curve(C), dq)
    pts = [P.lift(L) for P in sample]
    in_kernel = all(kernel_test(ext, CL, P) for P in pts)
    if not in_kernel:
        return IsoVerdict(False, False, False, False, False, 0)
    images = [twist_transfer(ext, CL, P) for P in pts]
    injective = all((P == Q) == (fp == fq)
                    for P, fp in zip(pts, images) for Q, fq in zip(pts, images))
    round_trip = all(transfer_inverse(C, dq, fp) == P for P, fp in zip(pts, images))
    hom = True
    pairs = 0
    for i, P in enumerate(pts):
        for j in range(i, len(pts)):
            S = add(CL, P, pts[j])
            hom &= twist_transfer(ext, CL, S) == add(Ed, images[i], images[j])
            pairs += 1
    ok = injective and hom and round_trip
    return IsoVerdict(ok, injective, hom, round_trip, True, pairs)
