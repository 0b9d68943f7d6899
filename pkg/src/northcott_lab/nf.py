"""Exact arithmetic in Q, Q(sqrt d) and Q(zeta_n).

Elements are stored as an integer numerator vector over the power basis plus
a positive common denominator, always reduced (gcd of everything is 1).  For
cyclotomic fields the vector is reduced modulo the n-th cyclotomic
polynomial, so equality of elements is equality of their representations.

Heights and houses are computed from complex embeddings evaluated with
mpmath at a working precision that is raised until the certified error radius
is small enough.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence, Union

import gmpy2
import mpmath
from gmpy2 import mpz

from . import kernels
from .estimate import HeightEstimate, log_abs_int, widen
from .polys import Poly, int_content_primitive

Number = Union[int, Fraction, "AlgNumber"]

MAX_PRECISION_RETRIES = 10
# Beyond this degree the exact Newton-identity route for characteristic
# polynomials is replaced by certified rounding of a numeric product.
EXACT_CHARPOLY_MAX_DEGREE = 24
# Square roots in cyclotomic fields enumerate 2**(D/2 - 1) sign patterns.
CYCLOTOMIC_SQRT_MAX_DEGREE = 20


class FieldMismatchError(ValueError):
    pass


class UnsupportedFieldError(ValueError):
    pass


class LiteralError(ValueError):
    """Malformed literal; ``position`` is the 0-based offending index."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position} in {text!r}")


# --------------------------------------------------------------------------
# small integer helpers


def _factor_small(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    r = n
    for p in _factor_small(n):
        r = r // p * (p - 1)
    return r


def mobius(n: int) -> int:
    f = _factor_small(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in _factor_small(n).values())


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: ``n = squarefree_part(n) * m**2``."""
    if n == 0:
        raise ValueError("squarefree part of 0")
    s = -1 if n < 0 else 1
    for p, e in _factor_small(n).items():
        if e % 2:
            s *= p
    return s


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            div = cyclotomic_poly(d)
            q = [0] * (len(num) - len(div) + 1)
            rem = num[:]
            for i in range(len(rem) - 1, len(div) - 2, -1):
                c = rem[i]
                if c:
                    q[i - len(div) + 1] = c
                    for j, dj in enumerate(div):
                        rem[i - len(div) + 1 + j] -= c * dj
            num = q
    return tuple(num)


@lru_cache(maxsize=None)
def _ramanujan(n: int, j: int) -> int:
    """Trace from Q(zeta_n) to Q of zeta_n**j."""
    g = math.gcd(n, j % n) if j % n else n
    m = n // g
    return mobius(m) * euler_phi(n) // euler_phi(m)


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldSpec:
    """One of Q, Q(sqrt d) (d squarefree, not 0 or 1) or Q(zeta_n) (n >= 3)."""

    kind: str
    param: int = 0

    def __post_init__(self) -> None:
        if self.kind == "rational":
            if self.param != 0:
                raise ValueError("rational field takes no parameter")
        elif self.kind == "quadratic":
            d = self.param
            if d in (0, 1) or not is_squarefree(d):
                raise ValueError(f"quadratic field needs squarefree d != 0, 1; got {d}")
        elif self.kind == "cyclotomic":
            if self.param < 3:
                raise ValueError(f"cyclotomic field needs n >= 3; got {self.param}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> FieldSpec:
        return cls("rational", 0)

    @classmethod
    def quadratic(cls, d: int) -> FieldSpec:
        return cls("quadratic", int(d))

    @classmethod
    def cyclotomic(cls, n: int) -> FieldSpec:
        return cls("cyclotomic", int(n))

    @property
    def degree(self) -> int:
        if self.kind == "rational":
            return 1
        if self.kind == "quadratic":
            return 2
        return euler_phi(self.param)

    @property
    def modulus(self) -> tuple[int, ...]:
        """Low coefficients of the monic defining polynomial of the generator."""
        if self.kind == "rational":
            return (0,)
        if self.kind == "quadratic":
            return (-self.param, 0)
        return cyclotomic_poly(self.param)[:-1]

    def __str__(self) -> str:
        if self.kind == "rational":
            return "Q"
        if self.kind == "quadratic":
            return f"Q(sqrt,{self.param})"
        return f"Q(zeta,{self.param})"

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        s = text.strip()
        if s == "Q":
            return cls.rational()
        m = re.fullmatch(r"Q\(\s*(sqrt|zeta)\s*,\s*([+-]?\d+)\s*\)", s)
        if not m:
            pos = 0
            while pos < len(s) and pos < 2 and s[pos] == "Q("[pos]:
                pos += 1
            raise LiteralError(text, pos, "expected Q, Q(sqrt,d) or Q(zeta,n)")
        kind = "quadratic" if m.group(1) == "sqrt" else "cyclotomic"
        try:
            return cls(kind, int(m.group(2)))
        except ValueError as exc:
            raise LiteralError(text, m.start(2), str(exc)) from None

    # element constructors
    def element(self, coords: Sequence[Union[int, Fraction, str]]) -> AlgNumber:
        return AlgNumber.from_coords(self, coords)

    def zero(self) -> AlgNumber:
        return AlgNumber(self, (0,) * self.degree, 1)

    def one(self) -> AlgNumber:
        return self(1)

    def __call__(self, value: Union[int, Fraction, str, AlgNumber]) -> AlgNumber:
        if isinstance(value, AlgNumber):
            return value.lift(self)
        if isinstance(value, str):
            return parse_element(value, self)
        q = Fraction(value)
        return AlgNumber(self, (q.numerator,) + (0,) * (self.degree - 1), q.denominator)

    def gen(self) -> AlgNumber:
        """sqrt(d) for quadratic fields, zeta_n for cyclotomic fields."""
        if self.kind == "rational":
            raise UnsupportedFieldError("Q has no generator")
        return self.power_of_gen(1)

    def power_of_gen(self, j: int) -> AlgNumber:
        if self.kind == "cyclotomic":
            n = self.param
            v = [0] * n
            v[j % n] = 1
            return AlgNumber(self, kernels.reduce_mod(v, self.modulus), 1)
        if self.kind == "quadratic":
            if j % 2 == 0:
                return self(Fraction(self.param) ** (j // 2))
            return self.gen_power_odd(j)
        raise UnsupportedFieldError("Q has no generator")

    def gen_power_odd(self, j: int) -> AlgNumber:
        q = Fraction(self.param) ** ((j - 1) // 2)
        return AlgNumber(self, (0, q.numerator), q.denominator)

    def contains_i(self) -> bool:
        if self.kind == "quadratic":
            return self.param == -1
        if self.kind == "cyclotomic":
            return self.param % 4 == 0
        return False

    def imaginary_unit(self) -> AlgNumber:
        """The designated square root of -1 (maps to +i in the first embedding)."""
        if self.kind == "quadratic" and self.param == -1:
            return AlgNumber(self, (0, 1), 1)
        if self.kind == "cyclotomic" and self.param % 4 == 0:
            return self.power_of_gen(self.param // 4)
        raise UnsupportedFieldError(f"{self} does not contain i")

    def group_exponents(self) -> list[int]:
        if self.kind == "quadratic":
            return [1, -1]
        if self.kind == "cyclotomic":
            n = self.param
            return [k for k in range(1, n) if math.gcd(k, n) == 1]
        return [1]


QQ = FieldSpec.rational()


# --------------------------------------------------------------------------
# elements


def _norm(num: Sequence, den) -> tuple[tuple, mpz]:
    den = mpz(den)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    num = [mpz(c) for c in num]
    if den < 0:
        den = -den
        num = [-c for c in num]
    if den != 1:
        g = gmpy2.gcd(den, *num)
        if g != 1:
            den //= g
            num = [c // g for c in num]
    if not any(num):
        den = mpz(1)
    return tuple(num), den


class AlgNumber:
    """Immutable exact element of a supported number field."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: FieldSpec, num: Sequence, den=1, *, _reduced: bool = False):
        if len(num) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(num)}")
        if _reduced:
            self.num, self.den = tuple(num), den
        else:
            self.num, self.den = _norm(num, den)
        self.field = field
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def from_coords(cls, field: FieldSpec, coords: Sequence[Union[int, Fraction, str]]) -> AlgNumber:
        fr = [Fraction(c) for c in coords]
        if field.kind == "cyclotomic" and len(fr) != field.degree:
            den = math.lcm(*[c.denominator for c in fr]) if fr else 1
            ints = [int(c * den) for c in fr] or [0]
            ints = ints + [0] * max(0, field.param - len(ints))
            # fold powers >= n using zeta^n = 1
            folded = [0] * field.param
            for j, c in enumerate(ints):
                folded[j % field.param] += c
            return cls(field, kernels.reduce_mod(folded, field.modulus), den)
        if len(fr) != field.degree:
            raise ValueError(f"{field} needs {field.degree} coordinates, got {len(fr)}")
        den = math.lcm(*[c.denominator for c in fr])
        return cls(field, [c.numerator * (den // c.denominator) for c in fr], den)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        d = int(self.den)
        return tuple(Fraction(int(c), d) for c in self.num)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(int(self.num[0]), int(self.den))

    def is_algebraic_integer(self) -> bool:
        if self.den == 1:
            return True
        if self.field.kind == "quadratic":
            # Z[(1+sqrt d)/2] when d = 1 mod 4
            tr = 2 * self.num[0]
            nm = self.num[0] ** 2 - self.field.param * self.num[1] ** 2
            return tr % self.den == 0 and nm % (self.den * self.den) == 0
        return False

    # coercion -------------------------------------------------------------
    def lift(self, field: FieldSpec) -> AlgNumber:
        if field == self.field:
            return self
        if self.is_rational():
            return AlgNumber(field, (self.num[0],) + (0,) * (field.degree - 1), self.den, _reduced=True)
        raise FieldMismatchError(f"cannot move {self} from {self.field} to {field}")

    def _co(self, other: Number) -> AlgNumber:
        if isinstance(other, AlgNumber):
            if other.field == self.field:
                return other
            if other.is_rational():
                return other.lift(self.field)
            if self.is_rational():
                raise _Promote(other.field)
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if isinstance(other, (int, Fraction)) or hasattr(other, "__index__"):
            q = Fraction(other)
            return AlgNumber(self.field, (q.numerator,) + (0,) * (self.field.degree - 1), q.denominator)
        raise TypeError(f"cannot combine AlgNumber with {type(other).__name__}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: Number) -> AlgNumber:
        try:
            o = self._co(other)
        except _Promote as p:
            return self.lift(p.field) + other
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return AlgNumber(self.field, [a + b for a, b in zip(self.num, o.num)], self.den)
        return AlgNumber(self.field, [a * o.den + b * self.den for a, b in zip(self.num, o.num)],
                         self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> AlgNumber:
        return AlgNumber(self.field, [-a for a in self.num], self.den, _reduced=True)

    def __sub__(self, other: Number) -> AlgNumber:
        try:
            o = self._co(other)
        except _Promote as p:
            return self.lift(p.field) - other
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Number) -> AlgNumber:
        return (-self) + other

    def __mul__(self, other: Number) -> AlgNumber:
        try:
            o = self._co(other)
        except _Promote as p:
            return self.lift(p.field) * other
        except TypeError:
            return NotImplemented
        f = self.field
        if f.kind == "rational" or o.is_rational():
            c = o.num[0]
            return AlgNumber(f, [a * c for a in self.num], self.den * o.den)
        if self.is_rational():
            c = self.num[0]
            return AlgNumber(f, [c * b for b in o.num], self.den * o.den)
        if f.kind == "quadratic":
            a0, a1 = self.num
            b0, b1 = o.num
            return AlgNumber(f, [a0 * b0 + f.param * a1 * b1, a0 * b1 + a1 * b0], self.den * o.den)
        return AlgNumber(f, kernels.mulmod(self.num, o.num, f.modulus), self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> AlgNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        f = self.field
        if self.is_rational():
            c = self.num[0]
            return AlgNumber(f, (self.den,) + (0,) * (f.degree - 1), c)
        if f.kind == "quadratic":
            a0, a1 = self.num
            nrm = a0 * a0 - f.param * a1 * a1
            return AlgNumber(f, [a0 * self.den, -a1 * self.den], nrm)
        if f.degree <= 16:
            # a^-1 = (product of the other conjugates) / norm
            acc = None
            for k in f.group_exponents()[1:]:
                c = apply_auto(Automorphism(f, k), self)
                acc = c if acc is None else acc * c
            nrm = self * acc
            assert nrm.is_rational()
            return AlgNumber(f, [c * nrm.den for c in acc.num], acc.den * nrm.num[0])
        return _inverse_euclid(self)

    def __truediv__(self, other: Number) -> AlgNumber:
        try:
            o = self._co(other)
        except _Promote as p:
            return self.lift(p.field) / other
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> AlgNumber:
        return self.inverse() * other

    def __pow__(self, e: int) -> AlgNumber:
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # comparison -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgNumber):
            if other.field != self.field:
                if self.is_rational() and other.is_rational():
                    return self.num[0] == other.num[0] and self.den == other.den
                return False
            return self.den == other.den and self.num == other.num
        if isinstance(other, (int, Fraction)):
            if not self.is_rational():
                return False
            return Fraction(int(self.num[0]), int(self.den)) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(int(self.num[0]), int(self.den)))
            else:
                self._hash = hash((self.field, self.num, self.den))
        return self._hash

    def sort_key(self) -> tuple:
        return tuple(self.coords)

    # display --------------------------------------------------------------
    def __repr__(self) -> str:
        return f"AlgNumber({self.field}, {format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)

    def conjugate(self) -> AlgNumber:
        """Complex conjugation (exponent -1 in the Galois group)."""
        if self.field.kind == "rational":
            return self
        if self.field.kind == "quadratic":
            if self.field.param > 0:
                return self
            return apply_auto(Automorphism(self.field, -1), self)
        return apply_auto(Automorphism(self.field, self.field.param - 1), self)


class _Promote(Exception):
    def __init__(self, field: FieldSpec):
        self.field = field


def _inverse_euclid(a: AlgNumber) -> AlgNumber:
    f = a.field
    full = list(cyclotomic_poly(f.param))
    modp = Poly([Fraction(c) for c in full])
    ap = Poly(list(a.coords))
    # extended Euclid: s*a + t*Phi = 1
    r0, r1 = modp, ap
    s0, s1 = Poly([]), Poly([Fraction(1)])
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r0.degree != 0:
        raise ZeroDivisionError("element not invertible")
    inv = s0 * (Fraction(1) / r0.lead)
    cs = list(inv.coeffs) + [Fraction(0)] * (f.degree - len(inv.coeffs))
    return AlgNumber.from_coords(f, cs[: f.degree])


# --------------------------------------------------------------------------
# literals


_RAT = r"[+-]?\d+(?:/\d+)?"


def _parse_rational(text: str, start: int = 0) -> Fraction:
    s = text.strip()
    if not re.fullmatch(_RAT, s):
        bad = 0
        for i, ch in enumerate(s):
            if not (ch.isdigit() or ch in "+-/"):
                bad = i
                break
        else:
            bad = len(s)
        raise LiteralError(text, start + bad, "expected rational p/q")
    p, _, q = s.partition("/")
    if q and int(q) == 0:
        raise LiteralError(text, start + s.index("/") + 1, "zero denominator")
    return Fraction(int(p), int(q) if q else 1)


def parse_element(text: str, field: FieldSpec) -> AlgNumber:
    """Parse ``p/q``, ``p/q+r/s*sqrt`` (quadratic) or ``[c0,c1,...]`` (cyclotomic)."""
    s = text.strip()
    if field.kind == "cyclotomic" and s.startswith("["):
        if not s.endswith("]"):
            raise LiteralError(text, len(text), "missing closing ']'")
        body = s[1:-1]
        coords = []
        pos = text.index("[") + 1
        for part in body.split(","):
            coords.append(_parse_rational(part, pos) if part.strip() else _raise_empty(text, pos))
            pos += len(part) + 1
        if len(coords) != field.degree:
            raise LiteralError(text, len(text.rstrip()) - 1,
                               f"{field} needs {field.degree} coordinates, got {len(coords)}")
        return AlgNumber.from_coords(field, coords)
    if field.kind == "quadratic" and "sqrt" in s:
        return _parse_quadratic(text, field)
    if field.kind == "cyclotomic" and "zeta" in s:
        raise LiteralError(text, s.index("zeta"), "cyclotomic elements use [c0,c1,...]")
    return field(_parse_rational(text))


def _raise_empty(text: str, pos: int):
    raise LiteralError(text, pos, "empty coordinate")


def _parse_quadratic(text: str, field: FieldSpec) -> AlgNumber:
    s = text.replace(" ", "")
    terms = re.finditer(r"([+-]?)([^+-]*)", s)
    rat = Fraction(0)
    irr = Fraction(0)
    pos = 0
    for m in terms:
        sign, body = m.group(1), m.group(2)
        if not sign and not body:
            continue
        if not body:
            raise LiteralError(text, m.start(), "dangling sign")
        neg = sign == "-"
        if body.endswith("sqrt"):
            coef = body[: -len("sqrt")]
            if coef.endswith("*"):
                coef = coef[:-1]
            val = _parse_rational(coef, m.start(2)) if coef else Fraction(1)
            irr += -val if neg else val
        else:
            if "sqrt" in body or "*" in body:
                raise LiteralError(text, m.start(2) + max(body.find("sqrt"), body.find("*")), "bad term")
            val = _parse_rational(body, m.start(2))
            rat += -val if neg else val
        pos = m.end()
    if pos != len(s):
        raise LiteralError(text, pos, "trailing characters")
    return AlgNumber.from_coords(field, [rat, irr])


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_element(a: AlgNumber) -> str:
    cs = a.coords
    if a.field.kind == "rational" or (a.field.kind == "quadratic" and cs[1] == 0):
        return _fmt_q(cs[0])
    if a.field.kind == "quadratic":
        r, t = cs
        tail = "sqrt" if t == 1 else "-sqrt" if t == -1 else f"{_fmt_q(t)}*sqrt"
        if r == 0:
            return tail
        return f"{_fmt_q(r)}{'' if tail.startswith('-') else '+'}{tail}"
    return "[" + ",".join(_fmt_q(c) for c in cs) + "]"


# --------------------------------------------------------------------------
# Galois action


@dataclass(frozen=True)
class Automorphism:
    """sqrt d -> k*sqrt d (k = +-1) or zeta_n -> zeta_n**k."""

    field: FieldSpec
    k: int

    def __post_init__(self) -> None:
        f = self.field
        if f.kind == "quadratic":
            if self.k not in (1, -1):
                raise ValueError("quadratic automorphisms have k = +-1")
        elif f.kind == "cyclotomic":
            n = f.param
            object.__setattr__(self, "k", self.k % n)
            if math.gcd(self.k, n) != 1:
                raise ValueError(f"exponent {self.k} not invertible mod {n}")
        elif self.k != 1:
            raise ValueError("Q has only the identity")

    def __call__(self, a: AlgNumber) -> AlgNumber:
        return apply_auto(self, a)

    def compose(self, other: Automorphism) -> Automorphism:
        """``self o other``."""
        if other.field != self.field:
            raise FieldMismatchError("automorphisms of different fields")
        if self.field.kind == "cyclotomic":
            return Automorphism(self.field, self.k * other.k % self.field.param)
        return Automorphism(self.field, self.k * other.k)

    def inverse(self) -> Automorphism:
        if self.field.kind == "cyclotomic":
            return Automorphism(self.field, pow(self.k, -1, self.field.param))
        return self

    @property
    def is_identity(self) -> bool:
        return self.k == 1

    def __str__(self) -> str:
        f = self.field
        if f.kind == "quadratic":
            return "id" if self.k == 1 else "sqrt->-sqrt"
        if f.kind == "cyclotomic":
            return f"zeta->zeta^{self.k}"
        return "id"


def apply_auto(sigma: Automorphism, a: AlgNumber) -> AlgNumber:
    f = sigma.field
    if a.field != f:
        if a.is_rational():
            return a
        raise FieldMismatchError(f"automorphism of {f} applied to element of {a.field}")
    if sigma.k == 1 or a.is_rational():
        return a
    if f.kind == "quadratic":
        return AlgNumber(f, (a.num[0], -a.num[1]), a.den, _reduced=True)
    n = f.param
    v = [0] * n
    for j, c in enumerate(a.num):
        if c:
            v[j * sigma.k % n] += c
    return AlgNumber(f, kernels.reduce_mod(v, f.modulus), a.den)


def galois_group(field: FieldSpec) -> list[Automorphism]:
    if field.kind == "rational":
        raise UnsupportedFieldError("Galois group requested for Q")
    return [Automorphism(field, k) for k in field.group_exponents()]


def galois_orbit(a: AlgNumber) -> list[AlgNumber]:
    """Distinct conjugates of ``a`` inside its field, identity image first."""
    if a.field.kind == "rational":
        return [a]
    seen: dict[AlgNumber, None] = {}
    for s in galois_group(a.field):
        seen.setdefault(apply_auto(s, a), None)
    return list(seen)


def _trace_q(a: AlgNumber) -> gmpy2.mpq:
    f = a.field
    if f.kind == "rational":
        return gmpy2.mpq(a.num[0], a.den)
    if f.kind == "quadratic":
        return gmpy2.mpq(2 * a.num[0], a.den)
    n = f.param
    t = mpz(0)
    for j, c in enumerate(a.num):
        if c:
            t += c * _ramanujan(n, j)
    return gmpy2.mpq(t, a.den)


def _to_fraction(q: gmpy2.mpq) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def trace(a: AlgNumber) -> Fraction:
    return _to_fraction(_trace_q(a))


# --------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class ComplexBall:
    center: mpmath.mpc
    radius: float

    def __abs__(self) -> float:
        return float(abs(self.center))


def _bits(x) -> int:
    return int(abs(mpz(x))).bit_length()


def _scale_bits(a: AlgNumber) -> int:
    """Upper bound for log2 of the largest absolute embedding."""
    s = sum(abs(c) for c in a.num) * (1 + abs(a.field.param) if a.field.kind == "quadratic" else 1)
    return max(0, _bits(s) - _bits(a.den) + 2)


@lru_cache(maxsize=64)
def _root_table(n: int, prec: int) -> tuple[tuple[mpz, mpz], ...]:
    """``exp(2 pi i t / n) * 2**prec`` rounded to integers; each component is
    within 2**-prec of the true value after scaling back."""
    out = []
    with mpmath.workprec(prec + 24):
        for t in range(n):
            c = mpmath.cospi(mpmath.mpf(2 * t) / n)
            s = mpmath.sinpi(mpmath.mpf(2 * t) / n)
            out.append((mpz(int(mpmath.nint(mpmath.ldexp(c, prec)))),
                        mpz(int(mpmath.nint(mpmath.ldexp(s, prec))))))
    return tuple(out)


def _embed_fixed(num: Sequence, n: int, prec: int, exps: Sequence[int]) -> tuple[list[tuple[mpz, mpz]], mpz]:
    """Fixed-point conjugates of the integer vector ``num`` in Q(zeta_n).

    Returns scaled pairs ``(re, im)`` and ``S = sum |num_j|``; each scaled-back
    component is within ``S * 2**-prec`` of the exact conjugate.
    """
    table = _root_table(n, prec)
    nz = [(j, mpz(c)) for j, c in enumerate(num) if c]
    out = []
    for k in exps:
        re_ = mpz(0)
        im_ = mpz(0)
        for j, c in nz:
            r, i = table[j * k % n]
            re_ += c * r
            im_ += c * i
        out.append((re_, im_))
    return out, sum(abs(c) for _, c in nz)


def _embed_at(a: AlgNumber, prec: int) -> tuple[list[mpmath.mpc], float]:
    """Embeddings at ``prec`` bits plus a uniform absolute error bound."""
    f = a.field
    if f.kind == "cyclotomic":
        fixed, S = _embed_fixed(a.num, f.param, prec, f.group_exponents())
        with mpmath.workprec(prec + 16):
            den = mpmath.mpf(int(a.den))
            vals = [mpmath.mpc(mpmath.ldexp(mpmath.mpf(int(r)), -prec),
                               mpmath.ldexp(mpmath.mpf(int(i)), -prec)) / den for r, i in fixed]
            mag = mpmath.mpf(int(S)) / den
        return vals, float(mag) * 2.0 ** (-prec + 2)
    with mpmath.workprec(prec + 16):
        den = mpmath.mpf(int(a.den))
        cs = [mpmath.mpf(int(c)) / den for c in a.num]
        mag = mpmath.fsum(abs(c) for c in cs)
        if f.kind == "rational":
            vals = [mpmath.mpc(cs[0])]
            err = float(mag) * 2.0 ** (-prec)
        else:
            d = f.param
            r = mpmath.sqrt(abs(d))
            w = mpmath.mpc(0, r) if d < 0 else mpmath.mpc(r)
            vals = [cs[0] + cs[1] * w, cs[0] - cs[1] * w]
            err = float(mag * (1 + r)) * 2.0 ** (-prec + 3)
    return vals, err


def embeddings(a: AlgNumber, precision: float = 1e-30) -> list[ComplexBall]:
    """All complex embeddings of ``a`` in Galois-group order, each within
    ``precision`` of the true conjugate."""
    if precision <= 0:
        raise ValueError("precision must be positive")
    need = _scale_bits(a) + max(0, int(-math.log2(precision))) + 20
    prec = max(64, need)
    for _ in range(MAX_PRECISION_RETRIES):
        vals, err = _embed_at(a, prec)
        if err <= precision:
            return [ComplexBall(v, widen(err)) for v in vals]
        prec *= 2
    raise ArithmeticError("embedding precision retries exhausted")


def house(a: AlgNumber, tol: float = 1e-15) -> HeightEstimate:
    """Largest absolute value among the conjugates of ``a``."""
    if a.is_rational():
        v = abs(a.to_fraction())
        fv = float(v)
        if v == int(v) and abs(v) < 2**53:
            return HeightEstimate(fv, 0.0, exact=True)
        return HeightEstimate(fv, widen(0.0, fv))
    balls = embeddings(a, tol / 4)
    best = max(balls, key=lambda b: abs(b.center))
    v = float(abs(best.center))
    return HeightEstimate(v, widen(best.radius + abs(v) * 1e-16, v))


# --------------------------------------------------------------------------
# characteristic and minimal polynomials


def _charpoly_newton(a: AlgNumber) -> list[gmpy2.mpq]:
    """Monic characteristic polynomial over Q (low degree first) via exact
    power sums and Newton's identities."""
    D = a.field.degree
    p = []
    x = a
    for k in range(1, D + 1):
        p.append(_trace_q(x))
        if k < D:
            x = x * a
    e = [gmpy2.mpq(1)]
    for k in range(1, D + 1):
        s = gmpy2.mpq(0)
        for i in range(1, k + 1):
            term = e[k - i] * p[i - 1]
            s += term if i % 2 == 1 else -term
        e.append(s / k)
    # X^D - e1 X^{D-1} + e2 X^{D-2} - ...
    coeffs = [gmpy2.mpq(0)] * (D + 1)
    for k in range(D + 1):
        coeffs[D - k] = e[k] if k % 2 == 0 else -e[k]
    return coeffs


def _int_poly_from_conjugates(vals: Sequence[tuple[mpz, mpz]], err_units: float,
                              prec: int) -> list[int] | None:
    """Round prod(X - v) to integers when the certified error allows it.

    ``vals`` are fixed-point conjugates scaled by 2**prec, each within
    ``err_units * 2**-prec`` of the true value.  Every truncating product adds at most 2**-prec per
    component, which the bound below absorbs.
    """
    one = mpz(1) << prec
    poly = [(one, mpz(0))]
    log_bound = 0.0
    err = math.ldexp(err_units, -prec)
    for vr, vi in vals:
        nxt = [(mpz(0), mpz(0))] * (len(poly) + 1)
        for i, (cr, ci) in enumerate(poly):
            ar, ai = nxt[i + 1]
            nxt[i + 1] = (ar + cr, ai + ci)
            br, bi = nxt[i]
            nxt[i] = (br - ((cr * vr - ci * vi) >> prec), bi - ((cr * vi + ci * vr) >> prec))
        poly = nxt
        sh = max(0, max(vr.bit_length(), vi.bit_length()) - 900)
        mod = math.ldexp(math.hypot(float(vr >> sh), float(vi >> sh)), sh - prec)
        log_bound += math.log1p(mod + err)
    m = len(vals)
    log_total = log_bound + math.log(m * err_units + 16 * m * m) - prec * math.log(2)
    if log_total >= math.log(0.25):
        return None
    total_err = math.exp(log_total)
    half = one >> 1
    limit = mpz(int((0.25 + total_err) * 2.0 ** 40)) << (prec - 40)
    out = []
    for cr, ci in poly:
        r = (cr + half) >> prec
        if abs(cr - (r << prec)) + abs(ci) > limit:
            return None
        out.append(int(r))
    return out


def _minpoly_numeric(a: AlgNumber) -> list[int]:
    """Primitive integer minimal polynomial (low degree first) by certified
    rounding of the product over the exact Galois orbit."""
    f = a.field
    beta = a * int(a.den)  # integral
    reps: list[int] = []
    seen: set[AlgNumber] = set()
    for k in f.group_exponents():
        img = apply_auto(Automorphism(f, k), beta)
        if img not in seen:
            seen.add(img)
            reps.append(k)
    m = len(reps)
    prec = 64 + _scale_bits(beta) * m + 2 * m
    for _ in range(MAX_PRECISION_RETRIES):
        vals, S = _embed_fixed(beta.num, f.param, prec, reps)
        ints = _int_poly_from_conjugates(vals, 2 * float(S), prec)
        if ints is not None:
            break
        prec *= 2
    else:
        raise ArithmeticError("minimal polynomial precision retries exhausted")
    # beta = den * a, so minpoly_a(X) ~ minpoly_beta(den * X)
    den = Fraction(int(a.den))
    fr = [Fraction(c) * den**i for i, c in enumerate(ints)]
    prim, _ = int_content_primitive(fr)
    return prim


def charpoly(a: AlgNumber) -> list[Fraction]:
    """Monic characteristic polynomial of multiplication by ``a`` (low first)."""
    if a.field.kind == "rational":
        return [-a.to_fraction(), Fraction(1)]
    if a.field.kind == "quadratic":
        u, v = a.coords
        return [u * u - a.field.param * v * v, -2 * u, Fraction(1)]
    if a.field.degree <= EXACT_CHARPOLY_MAX_DEGREE:
        return [_to_fraction(c) for c in _charpoly_newton(a)]
    mp = _minpoly_numeric(a)
    r = a.field.degree // (len(mp) - 1)
    p = Poly([Fraction(c, mp[-1]) for c in mp]) ** r
    return list(p.coeffs)


@dataclass(frozen=True)
class IntPoly:
    """Primitive integer polynomial with positive leading coefficient; the
    coefficient tuple is highest degree first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        cs = self.coefficients
        if not cs or cs[0] <= 0:
            raise ValueError("leading coefficient must be positive")
        if math.gcd(*cs) != 1:
            raise ValueError("polynomial must be primitive")

    @classmethod
    def from_low_first(cls, coeffs: Sequence[int]) -> IntPoly:
        return cls(tuple(int(c) for c in reversed(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def lead(self) -> int:
        return self.coefficients[0]

    def __call__(self, x):
        acc = 0 * x
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        parts = []
        d = self.degree
        for i, c in enumerate(self.coefficients):
            e = d - i
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                xs = "x" if e == 1 else f"x^{e}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            parts.append((sign, body))
        if not parts:
            return "0"
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {b}" for s, b in parts[1:])


def minimal_polynomial(a: AlgNumber) -> IntPoly:
    f = a.field
    if a.is_rational():
        q = a.to_fraction()
        return IntPoly((q.denominator, -q.numerator))
    if f.degree > EXACT_CHARPOLY_MAX_DEGREE:
        return IntPoly.from_low_first(_minpoly_numeric(a))
    cp = Poly(charpoly(a))
    deg = len(galois_orbit(a))
    mp = cp if deg == cp.degree else cp.squarefree_part()
    if mp.degree != deg:
        raise ArithmeticError("minimal polynomial degree disagrees with orbit size")
    ints, _ = int_content_primitive(mp.coeffs)
    return IntPoly.from_low_first(ints)


# --------------------------------------------------------------------------
# roots of unity, heights


def _root_of_unity_exponent(f: FieldSpec) -> int:
    if f.kind == "rational":
        return 2
    if f.kind == "quadratic":
        return {-1: 4, -3: 6}.get(f.param, 2)
    return math.lcm(2, f.param)


def is_root_of_unity(a: AlgNumber) -> bool:
    if a.is_zero() or not a.is_algebraic_integer():
        return False
    if a.is_rational():
        return abs(a.to_fraction()) == 1
    if house(a, 1e-9).lower > 1 + 1e-6:
        return False
    return a ** _root_of_unity_exponent(a.field) == 1


def _raw_mul(f: FieldSpec, u: Sequence, v: Sequence) -> list:
    """Product of integral coordinate vectors, without normalisation."""
    if f.kind == "rational":
        return [u[0] * v[0]]
    if f.kind == "quadratic":
        return [u[0] * v[0] + f.param * u[1] * v[1], u[0] * v[1] + u[1] * v[0]]
    return kernels.mulmod(u, v, f.modulus)


def _raw_auto(f: FieldSpec, k: int, u: Sequence) -> list:
    if k == 1 or f.kind == "rational":
        return list(u)
    if f.kind == "quadratic":
        return [u[0], -u[1]]
    n = f.param
    v = [0] * n
    for j, c in enumerate(u):
        if c:
            v[j * k % n] += c
    return kernels.reduce_mod(v, f.modulus)


def _raw_trace(f: FieldSpec, u: Sequence) -> mpz:
    if f.kind == "rational":
        return mpz(u[0])
    if f.kind == "quadratic":
        return 2 * mpz(u[0])
    n = f.param
    return sum((mpz(c) * _ramanujan(n, j) for j, c in enumerate(u) if c), mpz(0))


def integral_ratio(f: FieldSpec, num: Sequence, den: Sequence, scale=1) -> AlgNumber:
    """``num / (scale * den)`` for integral coordinate vectors, normalised once."""
    if not any(den):
        raise ZeroDivisionError("division by zero")
    if f.kind == "rational" or not any(den[1:]):
        return AlgNumber(f, num, mpz(den[0]) * scale)
    if f.degree > 16:
        return AlgNumber(f, num, 1) / (AlgNumber(f, den, 1) * scale)
    adj = None
    for k in f.group_exponents()[1:]:
        c = _raw_auto(f, k, den)
        adj = c if adj is None else _raw_mul(f, adj, c)
    nrm = _raw_mul(f, den, adj)
    assert not any(nrm[1:])
    return AlgNumber(f, _raw_mul(f, num, adj), nrm[0] * scale)


def _integral_charpoly(f: FieldSpec, u: Sequence) -> list[mpz]:
    """Elementary symmetric functions e_0..e_D of the conjugates of an
    algebraic integer given by integral coordinates."""
    D = f.degree
    p = []
    x = list(u)
    for k in range(1, D + 1):
        p.append(_raw_trace(f, x))
        if k < D:
            x = _raw_mul(f, x, u)
    e = [mpz(1)]
    for k in range(1, D + 1):
        s = mpz(0)
        for i in range(1, k + 1):
            term = e[k - i] * p[i - 1]
            s += term if i % 2 == 1 else -term
        q, r = divmod(s, k)
        assert r == 0
        e.append(q)
    return e


def _primitive_charpoly_lead(a: AlgNumber) -> int:
    if a.is_algebraic_integer():
        return 1
    if a.field.kind == "quadratic":
        u, v = (mpz(c) for c in a.num)
        w = mpz(a.den)
        cs = [u * u - a.field.param * v * v, -2 * u * w, w * w]
        g = gmpy2.gcd(*cs)
        return int(abs(cs[2] // g))
    if a.field.degree <= EXACT_CHARPOLY_MAX_DEGREE:
        # prod(den X - sigma(num)) has coefficients e_k den^(D-k)
        D = a.field.degree
        e = _integral_charpoly(a.field, a.num)
        w = mpz(a.den)
        lead = w ** D
        g = lead
        pw = mpz(1)
        for k in range(D, 0, -1):
            g = gmpy2.gcd(g, e[k] * pw)
            if g == 1:
                break
            pw *= w
        return int(lead // g)
    ints, _ = int_content_primitive(charpoly(a))
    return abs(ints[-1])


def weil_height(a: AlgNumber, tol: float = 1e-12) -> HeightEstimate:
    """Absolute logarithmic Weil height, normalised by the field degree."""
    if a.is_zero():
        return HeightEstimate.zero()
    if a.is_rational():
        m = max(abs(a.num[0]), a.den)
        if m == 1:
            return HeightEstimate.zero()
        v = log_abs_int(m)
        return HeightEstimate(v, widen(0.0, v))
    if is_root_of_unity(a):
        return HeightEstimate.zero()
    D = a.field.degree
    lead = _primitive_charpoly_lead(a)
    lead_log = log_abs_int(lead) if lead != 1 else 0.0
    target = max(tol, 1e-300) * 0.25
    balls = embeddings(a, min(target, 1e-20))
    total = 0.0
    rad = 0.0
    with mpmath.workprec(80):
        for b in balls:
            mod = abs(b.center)
            r = b.radius
            if mod + r <= 1:
                continue
            if mod - r >= 1:
                lv = float(mpmath.log(mod))
                total += lv
                rad += r / float(mod - r)
            else:
                # straddles 1: log+ lies in [0, log(mod + r)]
                hi = float(mpmath.log(mod + r))
                total += hi / 2
                rad += hi / 2
    value = (lead_log + total) / D
    radius = widen((rad + 1e-15 * (abs(lead_log) + abs(total))) / D, value)
    return HeightEstimate(value, radius)


# --------------------------------------------------------------------------
# square roots


def _sqrt_rational(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_quadratic(a: AlgNumber) -> AlgNumber | None:
    f = a.field
    d = f.param
    s, t = a.coords
    if t == 0:
        r = _sqrt_rational(s)
        if r is not None:
            return f(r)
        r = _sqrt_rational(s / d)
        if r is not None:
            return AlgNumber.from_coords(f, [0, r])
        return None
    nrm = s * s - d * t * t
    n = _sqrt_rational(nrm)
    if n is None:
        return None
    for cand in ((s + n) / 2, (s - n) / 2):
        x = _sqrt_rational(cand)
        if x:
            y = t / (2 * x)
            root = AlgNumber.from_coords(f, [x, y])
            if root * root == a:
                return root
    return None


def _solve_rational_system(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                fac = m[r][col]
                m[r] = [vr - fac * vc for vr, vc in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


@lru_cache(maxsize=None)
def _trace_matrix(n: int) -> tuple[tuple[Fraction, ...], ...]:
    D = euler_phi(n)
    return tuple(tuple(Fraction(_ramanujan(n, j - m)) for j in range(D)) for m in range(D))


def _sqrt_cyclotomic(a: AlgNumber) -> AlgNumber | None:
    f = a.field
    n, D = f.param, f.degree
    if D > CYCLOTOMIC_SQRT_MAX_DEGREE:
        raise UnsupportedFieldError(f"square roots in {f} (degree {D}) are not supported")
    fden = int(a.den)
    gamma = AlgNumber(f, [c * fden for c in a.num], 1)  # = a * den^2, integral
    exps = f.group_exponents()
    half = [i for i, k in enumerate(exps) if k < n - k]
    partner = {i: exps.index(n - exps[i]) for i in half}
    tmat = [list(r) for r in _trace_matrix(n)]
    prec = 64 + _scale_bits(gamma) // 2 + 2 * D
    for _ in range(MAX_PRECISION_RETRIES):
        vals, err = _embed_at(gamma, prec)
        with mpmath.workprec(prec + 16):
            roots = [mpmath.sqrt(v) for v in vals]
            mags = [abs(r) for r in roots]
            # |sqrt(v + e) - sqrt(v)| <= sqrt(|e|)
            rerr = math.sqrt(err) + float(max(mags)) * 2.0 ** (-prec + 2)
            bound = sum(float(m) for m in mags) + D * rerr
            t_err = D * rerr + bound * D * 2.0 ** (-prec + 4)
        if t_err < 0.25:
            break
        prec *= 2
    else:
        raise ArithmeticError("square-root precision retries exhausted")
    with mpmath.workprec(prec + 16):
        unit = [mpmath.expjpi(mpmath.mpf(-2 * t) / n) for t in range(n)]
        for signs in product((1, -1), repeat=max(0, len(half) - 1)):
            sv = (1,) + signs
            emb = [None] * D
            for s, i in zip(sv, half):
                emb[i] = roots[i] * s
                emb[partner[i]] = mpmath.conj(emb[i])
            tr = []
            ok = True
            for m in range(D):
                acc = mpmath.mpc(0)
                for i, k in enumerate(exps):
                    acc += emb[i] * unit[(m * k) % n]
                r = int(mpmath.nint(acc.real))
                if abs(float(acc.real) - r) > 0.45:
                    ok = False
                    break
                tr.append(Fraction(r))
            if not ok:
                continue
            coords = _solve_rational_system(tmat, tr)
            if any(c.denominator != 1 for c in coords):
                continue
            delta = AlgNumber.from_coords(f, coords)
            if delta * delta == gamma:
                return delta / fden
    return None


def sqrt_in_field(a: AlgNumber) -> AlgNumber | None:
    """A square root of ``a`` inside its own field, or None if there is none.

    The returned root is normalised by :func:`principal_root`.
    """
    if a.is_zero():
        return a
    f = a.field
    if a.is_rational() and f.kind == "rational":
        r = _sqrt_rational(a.to_fraction())
        root = None if r is None else f(r)
    elif f.kind == "rational":
        root = None
    elif f.kind == "quadratic":
        root = _sqrt_quadratic(a)
    else:
        if a.is_rational():
            r = _sqrt_rational(a.to_fraction())
            if r is not None:
                return f(r)
        root = _sqrt_cyclotomic(a)
    return None if root is None else principal_root(root)


def principal_root(r: AlgNumber) -> AlgNumber:
    """Choose between ``r`` and ``-r``: the one whose first embedding has
    positive real part, or positive imaginary part when the real part is 0."""
    if r.is_zero():
        return r
    if r.is_rational():
        return r if r.to_fraction() > 0 else -r
    if (r - r.conjugate()).is_zero():
        # real in the first embedding; sign decided numerically
        b = embeddings(r, 1e-30)[0]
        return r if b.center.real > 0 else -r
    if (r + r.conjugate()).is_zero():
        b = embeddings(r, 1e-30)[0]
        return r if b.center.imag > 0 else -r
    b = embeddings(r, 1e-30)[0]
    return r if b.center.real > 0 else -r


def designated_sqrt(field: FieldSpec, d: Number) -> AlgNumber:
    """The configured square root of ``d`` in ``field`` (principal branch)."""
    dd = d if isinstance(d, AlgNumber) else field(d)
    dd = dd.lift(field)
    r = sqrt_in_field(dd)
    if r is None:
        raise ValueError(f"{d} has no square root in {field}")
    return r


def to_number(x: Number, field: FieldSpec) -> AlgNumber:
    if isinstance(x, AlgNumber):
        return x.lift(field)
    return field(x)


def iter_fields(elements: Iterable[AlgNumber]) -> FieldSpec:
    """Common field of a collection of elements (rational ones adapt)."""
    field = QQ
    for e in elements:
        if e.field != QQ and not e.is_rational():
            if field != QQ and field != e.field:
                raise FieldMismatchError(f"{field} vs {e.field}")
            field = e.field
        elif e.field != QQ and field == QQ:
            field = e.field
    return field
