"""Dense univariate polynomials over an exact field.

Coefficients are stored low degree first and may be any exact field elements
(``Fraction`` or ``AlgNumber``).  The zero polynomial has an empty coefficient
tuple.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Sequence


class Poly:
    __slots__ = ("coeffs", "zero", "one")

    def __init__(self, coeffs: Iterable[Any], zero: Any = None, one: Any = None):
        cs = list(coeffs)
        if zero is None:
            zero = (cs[0] - cs[0]) if cs else Fraction(0)
        if one is None:
            one = zero + 1
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.zero = zero
        self.one = one

    def _new(self, coeffs: Iterable[Any]) -> Poly:
        return Poly(coeffs, self.zero, self.one)

    @classmethod
    def x(cls, zero: Any = Fraction(0), one: Any = Fraction(1)) -> Poly:
        return cls([zero, one], zero, one)

    @classmethod
    def const(cls, c: Any, zero: Any = Fraction(0), one: Any = Fraction(1)) -> Poly:
        return cls([c], zero, one)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Any:
        return self.coeffs[-1] if self.coeffs else self.zero

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"

    def _coerce(self, other: Any) -> Poly:
        if isinstance(other, Poly):
            return other
        return self._new([self.zero + other])

    def __add__(self, other: Any) -> Poly:
        o = self._coerce(other)
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        return self._new([(a[i] if i < len(a) else self.zero) + (b[i] if i < len(b) else self.zero)
                          for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return self._new([-c for c in self.coeffs])

    def __sub__(self, other: Any) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> Poly:
        if not isinstance(other, Poly):
            return self._new([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._new([])
        out = [self.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = self._new([self.one])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __call__(self, x: Any) -> Any:
        acc = self.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        return self._new([c * i for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lead_inv = self.one / other.lead
        if len(rem) - 1 < db:
            return self._new([]), self
        quo = [self.zero] * (len(rem) - db)
        bc = other.coeffs
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            t = c * lead_inv
            quo[i - db] = t
            for j in range(db + 1):
                rem[i - db + j] = rem[i - db + j] - t * bc[j]
        return self._new(quo), self._new(rem[:db])

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        inv = self.one / self.lead
        return self._new([c * inv for c in self.coeffs])

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self) -> Poly:
        g = self.gcd(self.derivative())
        return (self // g).monic()

    def compose_linear(self, scale: Any) -> Poly:
        """``p(scale * x)``."""
        out = []
        s = self.one
        for c in self.coeffs:
            out.append(c * s)
            s = s * scale
        return self._new(out)


def int_content_primitive(coeffs: Sequence[Fraction]) -> tuple[list[int], Fraction]:
    """Scale rational coefficients to a primitive integer vector with positive
    leading (last) entry; returns ``(ints, scale)`` with ``ints = scale * coeffs``."""
    from math import gcd, lcm

    fr = [Fraction(c) for c in coeffs]
    den = 1
    for c in fr:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in fr]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return ints, Fraction(1)
    if ints[-1] < 0:
        g = -g
    return [v // g for v in ints], Fraction(den, g)
