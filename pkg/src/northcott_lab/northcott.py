"""Bounded-height constructions: enumeration, the totally real family on
shifted curves, the (kab) threshold and multiplicative dependence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import sympy

from . import kernels
from .curve import INF, Curve, Point, on_curve, points_with_x
from .estimate import HeightEstimate
from .nf import (QQ, AlgNumber, FieldSpec, IntPoly, UnsupportedFieldError,
                 embeddings, galois_orbit, minimal_polynomial, squarefree_part,
                 weil_height)

# Relative slack on exp(T) so that a bound such as T = log 6 keeps x = 6
# despite the float rounding of log and exp.
HEIGHT_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class SearchBox:
    T: float
    H: int

    @classmethod
    def for_height(cls, T: float) -> SearchBox:
        if T < 0 or not math.isfinite(T):
            raise ValueError("T must be finite and >= 0")
        return cls(T, max(1, math.ceil(math.exp(T) * (1 - HEIGHT_BOUND_SLACK))))

    @property
    def limit(self) -> float:
        return math.exp(self.T) * (1 + HEIGHT_BOUND_SLACK)

    def rationals(self) -> Iterator[Fraction]:
        """Every p/q in lowest terms with |p|, q <= H and max(|p|, q) <= e^T."""
        lim = self.limit
        for q in range(1, self.H + 1):
            for p in range(-self.H, self.H + 1):
                if math.gcd(p, q) == 1 and max(abs(p), q) <= lim:
                    yield Fraction(p, q)


def point_order_key(P: Point) -> tuple:
    if P.is_infinity:
        return (0, -1.0, ())
    return (1, weil_height(P.x).value, P.sort_key())


def _rational_points(C: Curve, box: SearchBox) -> list[Point]:
    a, b, c = C.rational_coeffs()
    L = math.lcm(a.denominator, b.denominator, c.denominator)
    A, B, Cc = int(a * L), int(b * L), int(c * L)
    lim = box.limit
    out = []
    for p, q, r in kernels.square_candidates(L, A, B, Cc, box.H):
        if max(abs(p), q) > lim:
            continue
        x = QQ(Fraction(int(p), int(q)))
        y = Fraction(int(r), L * int(q) * int(q))
        out.append(Point(x, QQ(y)))
        if y:
            out.append(Point(x, QQ(-y)))
    return out


def enumerate_bounded(C: Curve, F: FieldSpec, T: float) -> list[Point]:
    """All F-points with ``h(x) <= T`` whose x-coordinate lies in the search box.

    Over Q the box is exactly the set of rationals of height <= T.  Over a
    quadratic field it is ``u + v sqrt d`` with u, v in that rational set, and
    candidates are then filtered by their Weil height.
    """
    box = SearchBox.for_height(T)
    if F.kind == "cyclotomic":
        raise UnsupportedFieldError("box enumeration is not supported over cyclotomic fields")
    if F.kind == "rational":
        if not C.is_rational():
            raise ValueError("curve is not defined over Q")
        pts = _rational_points(C.lift(QQ), box)
    else:
        CF = C.lift(F)
        rats = list(box.rationals())
        pts = []
        for u in rats:
            for v in rats:
                x = F.element([u, v])
                if v and weil_height(x).value > T + 1e-12:
                    continue
                pts.extend(points_with_x(CF, x, F))
    pts.append(INF)
    return sorted(set(pts), key=point_order_key)


# --------------------------------------------------------------------------
# the (kab) inequality


def _kab_margin(k: int, a: Fraction, b: Fraction) -> Fraction:
    return k ** 3 + k * a + b - (8 + 12 * k + 2 * (3 * k * k + abs(a)))


def kab_holds(k: int, a, b) -> bool:
    return _kab_margin(int(k), Fraction(a), Fraction(b)) > 0


def _rational(v) -> Fraction:
    if isinstance(v, AlgNumber):
        return v.to_fraction()
    return Fraction(v)


def kab_min_k(a, b) -> int:
    """Least integer k >= 1 with ``k^3 + ka + b > 8 + 12k + 2(3k^2 + |a|)``."""
    a, b = _rational(a), _rational(b)
    if 4 * a ** 3 + 27 * b * b == 0:
        raise ValueError(f"y^2 = x^3 + ({a})x + ({b}) is singular")
    # margin(k) = k^3 - 6k^2 + (a - 12)k + (b - 8 - 2|a|) is positive past the
    # Cauchy bound of its roots, so the scan below always terminates.
    cauchy = 1 + max(6, abs(a - 12), abs(b - 8 - 2 * abs(a)))
    for k in range(1, math.ceil(cauchy) + 2):
        if _kab_margin(k, a, b) > 0:
            return k
    raise AssertionError("scan passed the Cauchy bound")


def odd_primes_from(start: int = 5) -> Iterator[int]:
    p = start
    while True:
        if sympy.isprime(p):
            yield p
        p += 1


@dataclass(frozen=True)
class FamilyPoint:
    n: int
    x: AlgNumber
    y_squared: AlgNumber  # y is a designated root of this, outside Q(zeta_n)
    h: HeightEstimate
    minpoly: IntPoly
    orbit_size: int
    totally_positive: bool
    bound_ok: bool


@dataclass(frozen=True)
class FamilyRecord:
    a: Fraction
    b: Fraction
    k: int
    conductors: tuple[int, ...]
    points: tuple[FamilyPoint, ...]
    height_bound: float
    distinct: bool

    @property
    def all_bounded(self) -> bool:
        return all(p.bound_ok for p in self.points)

    @property
    def all_totally_positive(self) -> bool:
        return all(p.totally_positive for p in self.points)


def _totally_positive(v: AlgNumber) -> bool:
    for ball in embeddings(v, 1e-20):
        z = ball.center
        if abs(z.imag) > ball.radius + 1e-15 * (1 + abs(z)) or z.real - ball.radius <= 0:
            return False
    return True


def qtr_family(a, b, k: int, N: int, conductors: Optional[Sequence[int]] = None) -> FamilyRecord:
    """N points ``(zeta_n + zeta_n^{-1}, y)`` on ``E_k`` with pairwise distinct
    x-coordinates of naive height at most log 2."""
    a, b = _rational(a), _rational(b)
    if 4 * a ** 3 + 27 * b * b == 0:
        raise ValueError("singular base curve")
    margin = _kab_margin(int(k), a, b)
    if margin <= 0:
        lhs = k ** 3 + k * a + b
        rhs = 8 + 12 * k + 2 * (3 * k * k + abs(a))
        raise ValueError(f"k={k} fails the threshold: k^3+ka+b = {lhs} <= {rhs}")
    if N < 1:
        raise ValueError("N must be >= 1")
    if conductors is None:
        gen = odd_primes_from(5)
        conductors = [next(gen) for _ in range(N)]
    conductors = tuple(int(n) for n in conductors[:N])
    if len(conductors) < N or len(set(conductors)) != N:
        raise ValueError("need N distinct conductors")
    pts = []
    for n in conductors:
        F = FieldSpec.cyclotomic(n)
        z = F.gen()
        x = z + z.inverse()
        v = ((x + 3 * k) * x + (3 * k * k + a)) * x + (k ** 3 + a * k + b)
        # x is an algebraic integer and a sum of two roots of unity, so every
        # conjugate has modulus <= 2 and h(x) <= log 2 holds exactly.
        bound_ok = x.den == 1 and x == z + z ** (n - 1)
        orbit = len(galois_orbit(x))
        pts.append(FamilyPoint(n, x, v, weil_height(x), minimal_polynomial(x), orbit,
                               _totally_positive(v), bound_ok))
    # distinct orbit sizes give distinct degrees over Q, hence distinct x
    sizes = [p.orbit_size for p in pts]
    distinct = len(set(sizes)) == len(sizes)
    return FamilyRecord(a, b, int(k), conductors, tuple(pts), math.log(2), distinct)


# --------------------------------------------------------------------------
# multiplicative dependence


def _exponents(q: Fraction) -> dict[int, int]:
    out = dict(sympy.factorint(abs(q.numerator)))
    for p, e in sympy.factorint(q.denominator).items():
        out[p] = out.get(p, 0) - e
    out.pop(1, None)
    return out


def mult_dep_test(x, y) -> bool:
    """True iff ``x^m y^n = 1`` for some integers ``(m, n) != (0, 0)``."""
    x, y = _rational(x), _rational(y)
    if x == 0 or y == 0:
        raise ValueError("multiplicative dependence needs nonzero inputs")
    ex, ey = _exponents(x), _exponents(y)
    if not ex or not ey:
        return True  # +-1 is torsion: squaring it gives 1
    primes = sorted(set(ex) | set(ey))
    # rank-one test: ex and ey parallel (the sign is fixed by doubling m, n)
    vx = [ex.get(p, 0) for p in primes]
    vy = [ey.get(p, 0) for p in primes]
    return all(vx[i] * vy[j] == vx[j] * vy[i] for i in range(len(primes)) for j in range(i + 1, len(primes)))


def mult_dep_witness(x, y) -> Optional[tuple[int, int]]:
    """Smallest-magnitude ``(m, n)`` with ``x^m y^n = 1``, if dependent."""
    x, y = _rational(x), _rational(y)
    if not mult_dep_test(x, y):
        return None
    ex, ey = _exponents(x), _exponents(y)
    if not ex:
        return (2, 0) if x == -1 else (1, 0)
    if not ey:
        return (0, 2) if y == -1 else (0, 1)
    p = next(iter(ex))
    m, n = ey.get(p, 0), -ex[p]
    g = math.gcd(m, n)
    m, n = m // g, n // g
    if x ** m * y ** n != 1:
        m, n = 2 * m, 2 * n
    return m, n


# --------------------------------------------------------------------------
# points (p, sqrt(p(p^2+1)))


@dataclass(frozen=True)
class CCRow:
    p: int
    sign: int
    field: FieldSpec
    point: Point
    on_curve: bool
    h: HeightEstimate


def cc_points_demo(p_list: Sequence[int]) -> list[CCRow]:
    """For each prime p the points ``(+-p, sqrt(+-p(p^2+1)))`` on
    ``y^2 = x^3 + x``, each over its own quadratic field."""
    rows = []
    for p in p_list:
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        for sign in (1, -1):
            x = sign * p
            v = x ** 3 + x
            s = squarefree_part(v)
            m = math.isqrt(v // s)
            F = FieldSpec.quadratic(s)
            C = Curve.make(0, 1, 0, F)
            P = Point(F(x), m * F.gen())
            rows.append(CCRow(p, sign, F, P, on_curve(C, P), weil_height(P.x)))
    return rows
