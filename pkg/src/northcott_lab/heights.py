"""Naive and canonical heights of points and the identities they satisfy.

The canonical height is the limit of ``h(2^n P) / 4^n``.  The tail after the
last computed step is bounded by ``C / (3 * 4^n)`` where C bounds the doubling
defect ``|h(2Q) - 4h(Q)|``.  For curves with rational coefficients C is proved
(see :func:`doubling_constant`); otherwise it is twice the largest observed
defect, an empirical radius.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpz

from .curve import (DEFAULT_NMAX, INF, Curve, Endomorphism, Point, add,
                    endo_eval, mul, small_order, sub)
from .estimate import HeightEstimate, log_abs_int, widen
from .nf import AlgNumber, _raw_mul, integral_ratio, weil_height

DEFAULT_TOL = 1e-6
MAX_DOUBLINGS = 8
MIN_DOUBLINGS = 3
# Lower floor for the empirical defect constant, so that a few accidentally
# small defects cannot shrink the tail bound to nothing.
DEFECT_FLOOR = 0.1
TAIL_SAFETY = 2.0


def naive_height(C: Curve, P: Point) -> HeightEstimate:
    if P.is_infinity:
        return HeightEstimate.zero()
    return weil_height(P.x)


# --------------------------------------------------------------------------
# doubling sequences


def _det_bareiss(m: list[list[int]]) -> int:
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def form_resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of two binary forms given by coefficients, highest X power
    first (leading zeros allowed)."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (size - n - 1 - i))
    return _det_bareiss(rows)


@dataclass(frozen=True)
class _Sequence:
    heights: tuple[float, ...]
    radii: tuple[float, ...]
    torsion: bool  # doubling orbit hit O or repeated an x-coordinate


@lru_cache(maxsize=None)
def _rational_forms(C: Curve):
    a, b, c = C.rational_coeffs()
    L = math.lcm(a.denominator, b.denominator, c.denominator)
    A, B, Cc = int(a * L), int(b * L), int(c * L)
    N = (L * L, 0, -2 * B * L, -8 * Cc * L, B * B - 4 * A * Cc)
    D = (0, 4 * L * L, 4 * L * A, 4 * L * B, 4 * L * Cc)
    R = abs(form_resultant(N, D))
    if R == 0:
        raise ArithmeticError("doubling forms share a root; curve singular")
    return tuple(map(mpz, N)), tuple(map(mpz, D)), mpz(R)


def _solve_exact(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    a = [row[:] + [r] for row, r in zip(mat, rhs)]
    for k in range(n):
        piv = next(i for i in range(k, n) if a[i][k] != 0)
        a[k], a[piv] = a[piv], a[k]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k] / a[k][k]
                a[i] = [u - f * v for u, v in zip(a[i], a[k])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _bezout_norm(f: Sequence[int], g: Sequence[int], top: bool) -> int:
    """Least ``|A|_1 + |B|_1`` over integral A, B of degree 3 with
    ``A f + B g = r X^7`` (``top``) or ``r Z^7``, r a nonzero integer."""
    # unknowns: A coefficients then B coefficients, highest X power first
    cols = []
    for form in (f, g):
        for shift in range(4):
            col = [0] * 8
            for i, c in enumerate(form):
                col[shift + i] = c
            cols.append(col)
    mat = [[Fraction(cols[j][i]) for j in range(8)] for i in range(8)]
    rhs = [Fraction(0)] * 8
    rhs[0 if top else 7] = Fraction(1)
    sol = _solve_exact(mat, rhs)
    den = math.lcm(*[v.denominator for v in sol])
    return sum(abs(int(v * den)) for v in sol)


@lru_cache(maxsize=None)
def doubling_constant(C: Curve) -> float:
    """A bound on ``|h(x(2Q)) - 4 h(x(Q))|`` valid for every point Q of C over
    any number field, for a curve with rational coefficients.

    Upper side: ``log max(|N|_1, |D|_1)`` for the integral doubling forms.
    Lower side: ``log(|A|_1 + |B|_1)`` from ``A N + B D = r X^7`` and the
    same with ``Z^7``; r cancels by the product formula.
    """
    N, D, _ = _rational_forms(C)
    N, D = [int(v) for v in N], [int(v) for v in D]
    upper = max(sum(map(abs, N)), sum(map(abs, D)))
    lower = max(_bezout_norm(N, D, True), _bezout_norm(N, D, False))
    return widen(max(math.log(upper), math.log(lower)), 1.0)


def _eval_form(cs, X, Z):
    # Horner in X with Z powers: sum cs[i] X^(4-i) Z^i
    acc = cs[0]
    zp = mpz(1)
    for c in cs[1:]:
        zp = zp * Z
        acc = acc * X + c * zp
    return acc


def _rational_sequence(C: Curve, x: Fraction, steps: int) -> _Sequence:
    N, D, R = _rational_forms(C)
    X, Z = mpz(x.numerator), mpz(x.denominator)
    hs = [log_abs_int(max(abs(X), Z))]
    seen = {(X, Z)}
    for _ in range(steps):
        Dv = _eval_form(D, X, Z)
        if Dv == 0:
            return _Sequence(tuple(hs), (0.0,) * len(hs), True)
        Nv = _eval_form(N, X, Z)
        g = gmpy2.gcd(gmpy2.gcd(R, Nv), Dv)
        X, Z = Nv // g, Dv // g
        if Z < 0:
            X, Z = -X, -Z
        if (X, Z) in seen:
            return _Sequence(tuple(hs), (0.0,) * len(hs), True)
        seen.add((X, Z))
        hs.append(log_abs_int(max(abs(X), Z)))
    radii = tuple(widen(0.0, h) * 4 for h in hs)
    return _Sequence(tuple(hs), radii, False)


def _field_forms(C: Curve):
    """Integral coefficient vectors (L a, L b, L c) and the scale L."""
    L = mpz(1)
    for v in (C.a, C.b, C.c):
        L = gmpy2.lcm(L, v.den)
    return L, [[c * (L // v.den) for c in v.num] for v in (C.a, C.b, C.c)]


def _field_double(C: Curve, forms, x: AlgNumber) -> Optional[AlgNumber]:
    """``double_x`` on integral vectors, with a single normalisation."""
    f = C.field
    L, (A, B, Cc) = forms
    al, w = list(x.num), mpz(x.den)
    mul = lambda u, v: _raw_mul(f, u, v)
    lin = lambda *terms: [sum(col) for col in zip(*terms)]
    sc = lambda k, u: [k * c for c in u]
    a2 = mul(al, al)
    a3 = mul(a2, al)
    w2 = w * w
    w3 = w2 * w
    # L^2 (x^4 - 2b x^2 - 8c x + b^2 - 4ac) w^4
    disc = lin(mul(B, B), sc(-4, mul(A, Cc)))
    num = lin(sc(L * L, mul(a2, a2)), sc(-2 * L * w2, mul(B, a2)),
              sc(-8 * L * w3, mul(Cc, al)), sc(w2 * w2, disc))
    # L^2 4 F(x) w^4
    den = sc(4 * w, lin(sc(L * L, a3), sc(L * w, mul(A, a2)), sc(L * w2, mul(B, al)),
                        sc(L * w3, Cc)))
    if not any(den):
        return None
    return integral_ratio(f, num, den)


def _field_sequence(C: Curve, x: AlgNumber, steps: int) -> _Sequence:
    hs, rs = [], []
    forms = _field_forms(C)
    e = weil_height(x, 1e-14)
    hs.append(e.value)
    rs.append(e.radius)
    seen = {x}
    for _ in range(steps):
        x = _field_double(C, forms, x)
        if x is None or x in seen:
            return _Sequence(tuple(hs), tuple(rs), True)
        seen.add(x)
        e = weil_height(x, 1e-14)
        hs.append(e.value)
        rs.append(e.radius)
    return _Sequence(tuple(hs), tuple(rs), False)


@lru_cache(maxsize=4096)
def _doubling_sequence(C: Curve, x: AlgNumber, steps: int) -> _Sequence:
    if x.is_rational() and C.is_rational():
        return _rational_sequence(C, x.to_fraction(), steps)
    return _field_sequence(C, x.lift(C.field), steps)


def doubling_heights(C: Curve, P: Point, steps: int = MAX_DOUBLINGS) -> list[float]:
    """``h(2^k P)`` for k = 0..steps (shorter if the orbit reaches torsion)."""
    if P.is_infinity:
        return [0.0]
    return list(_doubling_sequence(C, P.x, steps).heights)


# --------------------------------------------------------------------------
# canonical height


def canonical_height(C: Curve, P: Point, tol: float = DEFAULT_TOL,
                     max_doublings: int = MAX_DOUBLINGS, Nmax: int = DEFAULT_NMAX) -> HeightEstimate:
    """Canonical height with a certified-by-construction radius.

    Torsion gives an exact 0.  When the doubling budget runs out before the
    radius reaches ``tol`` the estimate is returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if P.is_infinity:
        return HeightEstimate.zero()
    steps = max(max_doublings, MIN_DOUBLINGS)
    seq = _doubling_sequence(C, P.x, steps)
    if seq.torsion:
        return HeightEstimate.zero()
    hs, rs = seq.heights, seq.radii
    if C.is_rational():
        bound = doubling_constant(C)
    else:
        observed = [abs(hs[k + 1] - 4 * hs[k]) for k in range(len(hs) - 1)]
        bound = TAIL_SAFETY * max(observed + [DEFECT_FLOOR])
    chosen = None
    for n in range(MIN_DOUBLINGS, len(hs)):
        scale = 4.0 ** n
        radius = widen(bound / (3 * scale) + rs[n] / scale)
        chosen = (hs[n] / scale, radius)
        if radius <= tol:
            break
    value, radius = chosen
    est = HeightEstimate(value, radius, converged=radius <= tol)
    if est.lower <= 0 and small_order(C, P, Nmax) is not None:
        return HeightEstimate.zero()
    return est


def height_pairing(C: Curve, P: Point, Q: Point, tol: float = DEFAULT_TOL) -> HeightEstimate:
    """``<P, Q> = (h^(P+Q) - h^(P) - h^(Q)) / 2``."""
    if P == Q:
        return canonical_height(C, P, tol)
    s = canonical_height(C, add(C, P, Q), tol)
    return (s - canonical_height(C, P, tol) - canonical_height(C, Q, tol)).scaled(0.5)


@dataclass(frozen=True)
class ParallelogramVerdict:
    residual: float
    bound: float
    passed: bool


def check_parallelogram(C: Curve, P: Point, Q: Point, tol: float = DEFAULT_TOL) -> ParallelogramVerdict:
    hs = [canonical_height(C, R, tol) for R in (add(C, P, Q), sub(C, P, Q), P, Q)]
    combo = hs[0] + hs[1] - hs[2].scaled(2) - hs[3].scaled(2)
    res = abs(combo.value)
    return ParallelogramVerdict(res, combo.radius, res <= combo.radius)


@dataclass(frozen=True)
class EndoVerdict:
    degree: int
    ratio: Optional[float]
    ratio_radius: Optional[float]
    passed: bool
    torsion_input: bool = False


def endo_height_check(f: Endomorphism, P: Point, tol: float = DEFAULT_TOL) -> EndoVerdict:
    C = f.curve
    hp = canonical_height(C, P, tol)
    hf = canonical_height(C, endo_eval(f, P), tol)
    d = f.degree
    if hp.is_zero():
        return EndoVerdict(d, None, None, hf.is_zero(), torsion_input=True)
    if hp.lower <= 0:
        return EndoVerdict(d, None, None, False)
    ratio = hf.value / hp.value
    lo = hf.lower / hp.upper
    hi = hf.upper / hp.lower
    rad = widen(max(ratio - lo, hi - ratio), ratio)
    return EndoVerdict(d, ratio, rad, abs(ratio - d) <= rad)


@dataclass
class DiffRow:
    point: Point
    h: float
    hhat: HeightEstimate
    diff: float
    doubling_defect: float


@dataclass
class DiffReport:
    rows: list[DiffRow] = dc_field(default_factory=list)
    max_diff: Optional[float] = None
    max_doubling_defect: Optional[float] = None


def bounded_diff_report(C: Curve, sample: Sequence[Point], tol: float = DEFAULT_TOL) -> DiffReport:
    """Table of ``|h^(P) - h(P)|`` and ``|4h(P) - h(2P)|``; no threshold."""
    rep = DiffReport()
    for P in sample:
        h = naive_height(C, P).value
        hh = canonical_height(C, P, tol)
        h2 = naive_height(C, add(C, P, P)).value
        rep.rows.append(DiffRow(P, h, hh, abs(hh.value - h), abs(4 * h - h2)))
    if rep.rows:
        rep.max_diff = max(r.diff for r in rep.rows)
        rep.max_doubling_defect = max(r.doubling_defect for r in rep.rows)
    return rep


# --------------------------------------------------------------------------
# Gram matrix


@dataclass
class GramData:
    points: list[Point]
    matrix: list[list[HeightEstimate]]
    min_eigenvalue_lower_bound: float
    gershgorin_bound: float
    weyl_bound: float

    @property
    def independent(self) -> bool:
        return self.min_eigenvalue_lower_bound > 0


def _gershgorin(mid: np.ndarray, rad: np.ndarray) -> float:
    n = len(mid)
    best = math.inf
    for i in range(n):
        off = sum(abs(mid[i, j]) + rad[i, j] for j in range(n) if j != i)
        best = min(best, mid[i, i] - rad[i, i] - off)
    return best - 1e-12 * (1 + abs(best))


def _is_pos_def_exact(m: list[list[Fraction]]) -> bool:
    """Exact LDL^T test: all pivots strictly positive."""
    a = [row[:] for row in m]
    n = len(a)
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return True


def _weyl(mid: np.ndarray, rad: np.ndarray) -> float:
    """lambda_min(mid) certified exactly, minus a norm bound on the perturbation."""
    n = len(mid)
    lam = float(np.linalg.eigvalsh(mid).min())
    exact = [[Fraction(float(mid[i, j])) for j in range(n)] for i in range(n)]
    t = lam - 1e-12 * (1 + abs(lam))
    for _ in range(60):
        shifted = [[exact[i][j] - (Fraction(t) if i == j else 0) for j in range(n)] for i in range(n)]
        if _is_pos_def_exact(shifted):
            break
        t -= max(1e-12, abs(t)) * 2
    else:
        return -math.inf
    frob = math.sqrt(float(np.sum(rad * rad))) * (1 + 1e-12)
    return t - frob


def gram_lower_bound(C: Curve, points: Sequence[Point], tol: float = DEFAULT_TOL) -> GramData:
    """Certified lower bound on the least eigenvalue of the pairing matrix.

    The bound is the larger of a Gershgorin bound and an exact-LDL-certified
    eigenvalue of the midpoint matrix less the Frobenius norm of the radii.
    """
    pts = list(points)
    n = len(pts)
    M = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = height_pairing(C, pts[i], pts[j], tol)
            M[i][j] = M[j][i] = v
    if n == 0:
        return GramData(pts, M, math.inf, math.inf, math.inf)
    mid = np.array([[M[i][j].value for j in range(n)] for i in range(n)])
    rad = np.array([[M[i][j].radius for j in range(n)] for i in range(n)])
    g = _gershgorin(mid, rad)
    w = _weyl(mid, rad)
    return GramData(pts, M, max(g, w), g, w)


@dataclass
class GramCheck:
    checked: int
    failures: list[tuple[int, ...]]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_gram_inequality(C: Curve, gram: GramData, kmax: int = 3,
                           tol: float = DEFAULT_TOL) -> GramCheck:
    """Check ``h^(sum k_i P_i) >= c max k_i^2`` for all ``|k_i| <= kmax``."""
    c = gram.min_eigenvalue_lower_bound
    fails = []
    count = 0
    multiples = [{k: mul(C, k, P) for k in range(-kmax, kmax + 1)} for P in gram.points]
    for ks in itertools.product(range(-kmax, kmax + 1), repeat=len(gram.points)):
        R = INF
        for k, table in zip(ks, multiples):
            R = add(C, R, table[k])
        h = canonical_height(C, R, tol)
        count += 1
        if h.upper < c * max(k * k for k in ks):
            fails.append(ks)
    return GramCheck(count, fails)
