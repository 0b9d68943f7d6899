"""Elliptic curves ``y^2 = x^3 + a x^2 + b x + c`` over a supported field."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .factor import roots_in_field
from .nf import (QQ, AlgNumber, FieldMismatchError, FieldSpec, LiteralError,
                 UnsupportedFieldError, designated_sqrt, parse_element,
                 sqrt_in_field)
from .polys import Poly

DEFAULT_NMAX = 24
# Orders of torsion points over the supported fields at desk scale stay far
# below this; it only bounds the order search after torsion was detected.
ORDER_SEARCH_CAP = 5000

Coeff = Union[int, Fraction, AlgNumber, str]


class SingularCurveError(ValueError):
    pass


class NotOnCurveError(ValueError):
    pass


def _coerce(v: Coeff, field: FieldSpec) -> AlgNumber:
    if isinstance(v, AlgNumber):
        return v.lift(field)
    if isinstance(v, str):
        return parse_element(v, field)
    return field(v)


def cubic_discriminant(a: AlgNumber, b: AlgNumber, c: AlgNumber) -> AlgNumber:
    return a * a * b * b - 4 * b ** 3 - 4 * a ** 3 * c - 27 * c * c + 18 * a * b * c


@dataclass(frozen=True)
class Curve:
    field: FieldSpec
    a: AlgNumber
    b: AlgNumber
    c: AlgNumber

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _coerce(getattr(self, name), self.field))
        if cubic_discriminant(self.a, self.b, self.c).is_zero():
            raise SingularCurveError(f"singular model {self}")

    @classmethod
    def make(cls, a: Coeff, b: Coeff, c: Coeff, field: FieldSpec = QQ) -> Curve:
        return cls(field, _coerce(a, field), _coerce(b, field), _coerce(c, field))

    @classmethod
    def parse(cls, text: str) -> Curve:
        head, sep, tail = text.partition(" over ")
        field = FieldSpec.parse(tail) if sep else QQ
        parts = _split_top(head, text, 0)
        if len(parts) != 3:
            raise LiteralError(text, len(head), "curve literal needs three coefficients a,b,c")
        coeffs = []
        for start, part in parts:
            try:
                coeffs.append(parse_element(part, field))
            except LiteralError as exc:
                raise LiteralError(text, start + exc.position, exc.reason) from None
        try:
            return cls(field, *coeffs)
        except SingularCurveError as exc:
            raise LiteralError(text, 0, str(exc)) from None

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c} over {self.field}"

    def equation(self) -> str:
        return f"y^2 = x^3 + ({self.a})x^2 + ({self.b})x + ({self.c})"

    def cubic(self, x: AlgNumber) -> AlgNumber:
        return ((x + self.a) * x + self.b) * x + self.c

    def cubic_poly(self) -> Poly:
        F = self.field
        return Poly([self.c, self.b, self.a, F.one()], F.zero(), F.one())

    def is_rational(self) -> bool:
        return all(v.is_rational() for v in (self.a, self.b, self.c))

    def rational_coeffs(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.a.to_fraction(), self.b.to_fraction(), self.c.to_fraction()

    def lift(self, field: FieldSpec) -> Curve:
        if field == self.field:
            return self
        return Curve(field, self.a.lift(field), self.b.lift(field), self.c.lift(field))

    def is_cm_shaped(self) -> bool:
        """``a = c = 0`` over a field containing i."""
        return self.a.is_zero() and self.c.is_zero() and self.field.contains_i()

    # point construction
    def point(self, x: Coeff, y: Coeff) -> Point:
        P = Point(_coerce(x, self.field), _coerce(y, self.field))
        if not on_curve(self, P):
            raise NotOnCurveError(f"{P} is not on {self}")
        return P

    def parse_point(self, text: str) -> Point:
        s = text.strip()
        if s in ("inf", "O"):
            return INF
        if not (s.startswith("(") and s.endswith(")")):
            raise LiteralError(text, 0 if not s.startswith("(") else len(text),
                               "point literal must be 'inf' or '(x,y)'")
        off = text.index("(") + 1
        parts = _split_top(s[1:-1], text, off)
        if len(parts) != 2:
            raise LiteralError(text, off, "point literal needs two coordinates")
        vals = []
        for start, part in parts:
            try:
                vals.append(parse_element(part, self.field))
            except LiteralError as exc:
                raise LiteralError(text, start + exc.position, exc.reason) from None
        P = Point(*vals)
        if not on_curve(self, P):
            raise LiteralError(text, 0, f"point not on curve {self}")
        return P


def _split_top(body: str, full: str, offset: int) -> list[tuple[int, str]]:
    """Split on commas outside brackets, returning (start offset, piece)."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
            if depth < 0:
                raise LiteralError(full, offset + i, "unbalanced bracket")
        elif ch == "," and depth == 0:
            parts.append((offset + start, body[start:i]))
            start = i + 1
    if depth:
        raise LiteralError(full, offset + len(body), "unbalanced bracket")
    parts.append((offset + start, body[start:]))
    return parts


@dataclass(frozen=True)
class Point:
    """Affine point, or the point at infinity when both coordinates are None."""

    x: Optional[AlgNumber] = None
    y: Optional[AlgNumber] = None

    def __post_init__(self) -> None:
        if (self.x is None) != (self.y is None):
            raise ValueError("affine points need both coordinates")

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __neg__(self) -> Point:
        return self if self.is_infinity else Point(self.x, -self.y)

    def lift(self, field: FieldSpec) -> Point:
        return self if self.is_infinity else Point(self.x.lift(field), self.y.lift(field))

    def __str__(self) -> str:
        return "inf" if self.is_infinity else f"({self.x},{self.y})"

    def sort_key(self) -> tuple:
        return () if self.is_infinity else (self.x.sort_key(), self.y.sort_key())


INF = Point()


def _check(C: Curve, P: Point) -> None:
    if P.is_infinity:
        return
    for v in (P.x, P.y):
        if v.field != C.field and not v.is_rational():
            raise FieldMismatchError(f"point coordinate in {v.field}, curve over {C.field}")


def on_curve(C: Curve, P: Point) -> bool:
    _check(C, P)
    if P.is_infinity:
        return True
    x = P.x.lift(C.field) if P.x.is_rational() else P.x
    y = P.y.lift(C.field) if P.y.is_rational() else P.y
    return (y * y - C.cubic(x)).is_zero()


def _eq(u: AlgNumber, v: AlgNumber) -> bool:
    return (u - v).is_zero()


def add(C: Curve, P: Point, Q: Point) -> Point:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if _eq(x1, x2):
        if (y1 + y2).is_zero():
            return INF
        lam = (3 * x1 * x1 + 2 * C.a * x1 + C.b) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - C.a - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return Point(x3.lift(C.field), y3.lift(C.field))


def sub(C: Curve, P: Point, Q: Point) -> Point:
    return add(C, P, -Q)


def double(C: Curve, P: Point) -> Point:
    return add(C, P, P)


def mul(C: Curve, m: int, P: Point) -> Point:
    m = int(m)
    if m < 0:
        return -mul(C, -m, P)
    result = INF
    base = P
    while m:
        if m & 1:
            result = add(C, result, base)
        m >>= 1
        if m:
            base = add(C, base, base)
    return result


def double_x(C: Curve, x: AlgNumber) -> Optional[AlgNumber]:
    """x-coordinate of 2P from x(P); None when 2P is the point at infinity."""
    den = 4 * C.cubic(x)
    if den.is_zero():
        return None
    x2 = x * x
    num = x2 * x2 - 2 * C.b * x2 - 8 * C.c * x + C.b * C.b - 4 * C.a * C.c
    return num / den


# --------------------------------------------------------------------------
# twists and shifts


def twist(C: Curve, d: Coeff) -> Curve:
    dd = _coerce(d, C.field)
    if dd.is_zero():
        raise ValueError("twist by zero")
    return Curve(C.field, dd * C.a, dd * dd * C.b, dd ** 3 * C.c)


def twist_map(C: Curve, d: Coeff, P: Point, target_field: FieldSpec) -> Point:
    """``(x, y) -> (d x, d^{3/2} y)`` onto ``twist(C, d)`` over ``target_field``;
    ``d^{1/2}`` is the designated (principal) root in ``target_field``."""
    dd = _coerce(d, C.field)
    if dd.is_zero():
        raise ValueError("twist by zero")
    try:
        s = designated_sqrt(target_field, dd.lift(target_field))
    except (ValueError, FieldMismatchError, UnsupportedFieldError) as exc:
        raise ValueError(f"sqrt({dd}) is not representable in {target_field}: {exc}") from None
    E = twist(C, dd).lift(target_field)
    if P.is_infinity:
        return INF
    Pl = P.lift(target_field)
    dl = dd.lift(target_field)
    img = Point(dl * Pl.x, dl * s * Pl.y)
    if not on_curve(E, img):
        raise ArithmeticError("twist image failed the curve equation")
    return img


@dataclass(frozen=True)
class ShiftIsomorphism:
    source: Curve
    target: Curve
    k: int

    def forward(self, P: Point) -> Point:
        return P if P.is_infinity else Point(P.x - self.k, P.y)

    def backward(self, P: Point) -> Point:
        return P if P.is_infinity else Point(P.x + self.k, P.y)

    __call__ = forward


def shift_curve(C: Curve, k: int) -> tuple[Curve, ShiftIsomorphism]:
    """For ``y^2 = x^3 + A x + B`` return ``E_k: y^2 = (x+k)^3 + A(x+k) + B`` and
    the isomorphism ``(x, y) -> (x - k, y)``."""
    if not C.a.is_zero():
        raise ValueError("shift_curve needs a model without x^2 term")
    A, B = C.b, C.c
    k = int(k)
    E = Curve(C.field, C.field(3 * k), 3 * k * k + A, k ** 3 + A * k + B)
    return E, ShiftIsomorphism(C, E, k)


# --------------------------------------------------------------------------
# division polynomials


@dataclass(frozen=True)
class DivisionPolynomial:
    """``psi_m = f`` for odd m and ``psi_m = 2y * f`` for even m."""

    m: int
    f: Poly
    y_factor: bool
    cubic: Poly

    @property
    def x_part(self) -> Poly:
        """Polynomial whose roots are the x-coordinates of nonzero m-torsion."""
        return self.f * self.cubic if self.y_factor else self.f

    def expected_degree(self) -> int:
        m = self.m
        return (m * m - 4) // 2 if m % 2 == 0 else (m * m - 1) // 2

    def count_qbar_points(self) -> int:
        """Number of m-torsion points over the algebraic closure, O included,
        counted from the root data after an exact separability check."""
        f = self.f
        if f.degree > 0 and f.gcd(f.derivative()).degree > 0:
            raise ArithmeticError(f"f_{self.m} is not separable")
        n = 1 + 2 * max(f.degree, 0)
        if self.y_factor:
            if f.degree > 0 and f.gcd(self.cubic).degree > 0:
                raise ArithmeticError(f"f_{self.m} shares roots with the cubic")
            n += 3
        return n


def _division_fs(C: Curve, m: int) -> list[Poly]:
    F = C.field
    zero, one = F.zero(), F.one()
    P = lambda cs: Poly(cs, zero, one)
    a, b, c = C.a, C.b, C.c
    b2, b4, b6, b8 = 4 * a, 2 * b, 4 * c, 4 * a * c - b * b
    cub = C.cubic_poly()
    sixteen_f2 = cub * cub * 16
    fs = [P([]), P([one]), P([one]),
          P([b8, 3 * b6, 3 * b4, b2, F(3)]),
          P([b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2, F(2)])]
    for n in range(5, m + 1):
        k = n // 2
        if n % 2:
            if k % 2 == 0:
                val = sixteen_f2 * fs[k + 2] * fs[k] ** 3 - fs[k - 1] * fs[k + 1] ** 3
            else:
                val = fs[k + 2] * fs[k] ** 3 - sixteen_f2 * fs[k - 1] * fs[k + 1] ** 3
        else:
            val = fs[k] * (fs[k + 2] * fs[k - 1] ** 2 - fs[k - 2] * fs[k + 1] ** 2)
        fs.append(val)
    return fs


def division_polynomial(C: Curve, m: int) -> DivisionPolynomial:
    if m < 1:
        raise ValueError("division polynomial index must be >= 1")
    f = _division_fs(C, max(m, 4))[m]
    dp = DivisionPolynomial(m, f, m % 2 == 0, C.cubic_poly())
    if f.degree != dp.expected_degree():
        raise ArithmeticError(f"f_{m} has degree {f.degree}, expected {dp.expected_degree()}")
    return dp


@dataclass
class TorsionSet:
    """F-rational m-torsion; ``complete`` is False if a factor went unsearched."""

    points: list[Point]
    complete: bool = True
    unsearched: list[int] = None

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, P: object) -> bool:
        return P in self.points


def points_with_x(C: Curve, x: AlgNumber, F: FieldSpec) -> list[Point]:
    """All F-points of C with the given x-coordinate (0, 1 or 2 of them)."""
    x = x.lift(F)
    v = C.lift(F).cubic(x)
    if v.is_zero():
        return [Point(x, F.zero())]
    r = sqrt_in_field(v)
    if r is None:
        return []
    return [Point(x, r), Point(x, -r)]


def torsion_points(C: Curve, m: int, F: Optional[FieldSpec] = None) -> TorsionSet:
    F = F or C.field
    if m < 1:
        raise ValueError("m must be >= 1")
    CF = C.lift(F)
    if m == 1:
        return TorsionSet([INF], True, [])
    dp = division_polynomial(CF, m)
    search = roots_in_field(list(dp.x_part.coeffs), F)
    pts = [INF]
    for x in search.roots:
        for P in points_with_x(CF, x, F):
            if not mul(CF, m, P).is_infinity:
                raise ArithmeticError(f"{P} failed the m-torsion check")
            pts.append(P)
    pts.sort(key=lambda p: (not p.is_infinity, p.sort_key()))
    return TorsionSet(pts, search.complete, search.unsearched)


# --------------------------------------------------------------------------
# endomorphisms


@dataclass(frozen=True)
class Endomorphism:
    """``[m]`` (``b_int == 0``) or ``[a_int] + [b_int] o iota`` with
    ``iota(x, y) = (-x, i y)`` on ``y^2 = x^3 + b x``."""

    curve: Curve
    a_int: int
    b_int: int = 0

    def __post_init__(self) -> None:
        if self.b_int and not self.curve.is_cm_shaped():
            raise ValueError("CM form needs y^2 = x^3 + bx over a field containing i")

    @classmethod
    def scalar(cls, C: Curve, m: int) -> Endomorphism:
        return cls(C, int(m), 0)

    @classmethod
    def cm(cls, C: Curve, a_int: int, b_int: int) -> Endomorphism:
        return cls(C, int(a_int), int(b_int))

    @classmethod
    def parse(cls, C: Curve, text: str) -> Endomorphism:
        s = text.replace(" ", "")
        m = re.fullmatch(r"\[([+-]?\d+)\]", s)
        if m:
            return cls.scalar(C, int(m.group(1)))
        m = re.fullmatch(r"([+-]?\d+)?(?:([+-])(\d*)i)?", s)
        if m and s and (m.group(1) or m.group(2)):
            a = int(m.group(1)) if m.group(1) else 0
            b = 0
            if m.group(2):
                b = int(m.group(3) or 1) * (-1 if m.group(2) == "-" else 1)
            try:
                return cls.cm(C, a, b)
            except ValueError as exc:
                raise LiteralError(text, 0, str(exc)) from None
        m = re.fullmatch(r"([+-]?)(\d*)i", s)
        if m:
            b = int(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
            try:
                return cls.cm(C, 0, b)
            except ValueError as exc:
                raise LiteralError(text, 0, str(exc)) from None
        raise LiteralError(text, 0, "map literal must be '[m]' or 'a+bi'")

    @property
    def is_scalar(self) -> bool:
        return self.b_int == 0

    @property
    def degree(self) -> int:
        return self.a_int ** 2 + self.b_int ** 2

    def compose(self, other: Endomorphism) -> Endomorphism:
        """``self o other`` (Gaussian-integer multiplication)."""
        if other.curve != self.curve:
            raise ValueError("endomorphisms of different curves")
        a, b, c, d = self.a_int, self.b_int, other.a_int, other.b_int
        return Endomorphism(self.curve, a * c - b * d, a * d + b * c)

    def __call__(self, P: Point) -> Point:
        return endo_eval(self, P)

    def __str__(self) -> str:
        if self.is_scalar:
            return f"[{self.a_int}]"
        return f"{self.a_int}{'+' if self.b_int >= 0 else '-'}{abs(self.b_int)}i"


def iota(C: Curve, P: Point) -> Point:
    if not C.is_cm_shaped():
        raise ValueError("iota needs y^2 = x^3 + bx over a field containing i")
    if P.is_infinity:
        return P
    i = C.field.imaginary_unit()
    return Point(-P.x.lift(C.field), i * P.y)


def endo_eval(f: Endomorphism, P: Point) -> Point:
    C = f.curve
    if f.is_scalar:
        return mul(C, f.a_int, P)
    return add(C, mul(C, f.a_int, P), iota(C, mul(C, f.b_int, P)))


# --------------------------------------------------------------------------
# torsion test


@dataclass(frozen=True)
class TorsionVerdict:
    kind: str  # "torsion", "non_torsion" or "unknown"
    order: Optional[int] = None
    lower_bound: Optional[float] = None

    @property
    def is_torsion(self) -> bool:
        return self.kind == "torsion"

    def __str__(self) -> str:
        if self.kind == "torsion":
            return f"Torsion({self.order})"
        if self.kind == "non_torsion":
            return "NonTorsionCertified"
        return "Unknown"


def small_order(C: Curve, P: Point, limit: int) -> Optional[int]:
    """Least k <= limit with kP = O, by repeated addition."""
    Q = P
    for k in range(1, limit + 1):
        if Q.is_infinity:
            return k
        Q = add(C, Q, P)
    return None


def torsion_test(C: Curve, P: Point, Nmax: int = DEFAULT_NMAX, tol: float = 1e-6) -> TorsionVerdict:
    if Nmax < 1:
        raise ValueError("Nmax must be >= 1")
    from .heights import canonical_height

    k = small_order(C, P, Nmax)
    if k is not None:
        return TorsionVerdict("torsion", k)
    h = canonical_height(C, P, tol, Nmax=Nmax)
    if h.is_zero():
        # torsion detected by the doubling orbit, order beyond Nmax
        k = small_order(C, P, ORDER_SEARCH_CAP)
        return TorsionVerdict("torsion", k)
    if h.lower > 0:
        return TorsionVerdict("non_torsion", lower_bound=h.lower)
    return TorsionVerdict("unknown")
