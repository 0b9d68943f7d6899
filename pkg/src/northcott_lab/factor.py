"""Roots of univariate polynomials inside a supported field.

Factoring over Q is delegated to sympy.  Irreducible rational factors of
degree 1 and 2 are solved exactly; a higher-degree irreducible factor can only
have a root in F when its degree divides [F:Q], and is then factored over F
itself.  If that fails the factor is reported as unsearched.  Polynomials with non-rational coefficients are reduced to Q by
multiplying all Galois conjugates (the norm polynomial).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import sympy

from .nf import AlgNumber, FieldSpec, apply_auto, galois_group, sqrt_in_field
from .polys import Poly

_X = sympy.Symbol("x")


@dataclass
class RootSearch:
    """Roots found in the field; ``complete`` is False when some factor could
    not be searched (its degrees are listed in ``unsearched``)."""

    roots: list[AlgNumber]
    complete: bool = True
    unsearched: list[int] = dc_field(default_factory=list)


def rational_factors(coeffs: Sequence[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Irreducible factors over Q (low degree first, monic) with multiplicity."""
    hi = [sympy.Rational(c.numerator, c.denominator) for c in reversed(list(coeffs))]
    p = sympy.Poly(hi, _X, domain="QQ")
    if p.degree() <= 0:
        return []
    _, facs = p.factor_list()
    out = []
    for f, mult in facs:
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        lead = cs[-1]
        out.append(([c / lead for c in cs], mult))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def _roots_rational_poly(coeffs: Sequence[Fraction], F: FieldSpec) -> RootSearch:
    found: list[AlgNumber] = []
    res = RootSearch(found)
    for fac, _ in rational_factors(coeffs):
        deg = len(fac) - 1
        if deg == 1:
            found.append(F(-fac[0]))
        elif deg == 2:
            c0, c1 = fac[0], fac[1]
            disc = c1 * c1 - 4 * c0
            r = sqrt_in_field(F(disc))
            if r is not None:
                found.append((r - c1) / 2)
                found.append((-r - c1) / 2)
        elif F.degree % deg == 0:
            roots = _roots_over_field(fac, F)
            if roots is None:
                res.complete = False
                res.unsearched.append(deg)
            else:
                found.extend(roots)
    return res


def _sympy_field(F: FieldSpec):
    if F.kind == "quadratic":
        return sympy.QQ.algebraic_field(sympy.sqrt(F.param))
    return sympy.QQ.algebraic_field(sympy.exp(2 * sympy.pi * sympy.I / F.param))


def _roots_over_field(fac: Sequence[Fraction], F: FieldSpec) -> list[AlgNumber] | None:
    """Roots in F of an irreducible rational polynomial, from its linear
    factors over F; None when the factorisation is unavailable."""
    try:
        K = _sympy_field(F)
        hi = [sympy.Rational(c.numerator, c.denominator) for c in reversed(list(fac))]
        _, facs = sympy.Poly(hi, _X, domain=K).factor_list()
    except (sympy.polys.polyerrors.PolynomialError, NotImplementedError):
        return None
    out = []
    for f, _ in facs:
        if f.degree() != 1:
            continue
        lead, const = (K.convert(c) for c in f.all_coeffs())
        # ANP coefficients are power-basis vectors in the generator, high first
        root = K.to_sympy(-const / lead)
        vec = list(reversed((-const / lead).to_list()))
        r = F.element([Fraction(int(c.numerator), int(c.denominator)) for c in vec]
                      + [Fraction(0)] * (F.degree - len(vec)))
        if not _eval(fac, r).is_zero():
            raise ArithmeticError(f"field factorisation gave a non-root {root}")
        out.append(r)
    return out


def _eval(cs: Sequence[Fraction], r: AlgNumber) -> AlgNumber:
    acc = r.field.zero()
    for c in reversed(list(cs)):
        acc = acc * r + c
    return acc


def _norm_poly(p: Poly, F: FieldSpec) -> list[Fraction]:
    acc = None
    for s in galois_group(F):
        conj = Poly([apply_auto(s, c) for c in p.coeffs], F.zero(), F.one())
        acc = conj if acc is None else acc * conj
    out = []
    for c in acc.coeffs:
        if not c.is_rational():
            raise ArithmeticError("norm polynomial has non-rational coefficient")
        out.append(c.to_fraction())
    return out


def roots_in_field(coeffs: Sequence, F: FieldSpec) -> RootSearch:
    """Distinct roots in ``F`` of the polynomial with coefficients ``coeffs``
    (low degree first; ints, Fractions or elements of ``F``)."""
    cs = [c if isinstance(c, AlgNumber) else F(c) for c in coeffs]
    cs = [c.lift(F) if c.is_rational() else c for c in cs]
    while cs and cs[-1].is_zero():
        cs.pop()
    if len(cs) <= 1:
        return RootSearch([])
    if all(c.is_rational() for c in cs):
        res = _roots_rational_poly([c.to_fraction() for c in cs], F)
    else:
        p = Poly(cs, F.zero(), F.one())
        cand = _roots_rational_poly(_norm_poly(p, F), F)
        cand.roots = [r for r in cand.roots if p(r).is_zero()]
        res = cand
    uniq = {r: None for r in res.roots}
    res.roots = sorted(uniq, key=lambda r: r.sort_key())
    return res
