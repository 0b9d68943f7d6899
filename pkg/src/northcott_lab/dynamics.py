"""Forward orbits, preperiodic classification and backward chains under [2]."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .curve import (DEFAULT_NMAX, Curve, Endomorphism, Point, add,
                    endo_eval, points_with_x, torsion_points, torsion_test)
from .estimate import HeightEstimate
from .factor import roots_in_field
from .heights import DEFAULT_TOL, canonical_height, naive_height
from .nf import QQ

DEFAULT_MAX_ITER = 50


@dataclass
class OrbitRecord:
    start: Point
    map: Endomorphism
    iterates: list[Point]
    heights: list[HeightEstimate]
    cycle_start: Optional[int] = None
    period: Optional[int] = None
    truncated: bool = False

    @property
    def preperiodic(self) -> bool:
        return self.cycle_start is not None


def orbit(f: Endomorphism, P: Point, max_iter: int = DEFAULT_MAX_ITER) -> OrbitRecord:
    """Iterate ``f`` from ``P`` until an exact repeat or ``max_iter`` steps."""
    if f.degree < 1:
        raise ValueError("map must have degree >= 1")
    seen = {P: 0}
    its = [P]
    rec = OrbitRecord(P, f, its, [naive_height(f.curve, P)])
    cur = P
    for i in range(1, max_iter + 1):
        cur = endo_eval(f, cur)
        if cur in seen:
            rec.cycle_start = seen[cur]
            rec.period = i - seen[cur]
            return rec
        seen[cur] = i
        its.append(cur)
        rec.heights.append(naive_height(f.curve, cur))
    rec.truncated = True
    return rec


def classify_preperiodic(f: Endomorphism, P: Point, Nmax: int = DEFAULT_NMAX,
                         tol: float = DEFAULT_TOL) -> str:
    """"Preperiodic", "Wandering" or "Unknown"; preperiodic points of a map of
    degree >= 2 are exactly the torsion points."""
    if f.degree < 2:
        raise ValueError("classification needs a map of degree >= 2")
    v = torsion_test(f.curve, P, Nmax, tol)
    return {"torsion": "Preperiodic", "non_torsion": "Wandering"}.get(v.kind, "Unknown")


# --------------------------------------------------------------------------
# halving over Q


@dataclass
class Preimages:
    points: list[Point]
    complete: bool = True


def _rational_curve(C: Curve) -> Curve:
    if not C.is_rational():
        raise ValueError("halving needs a curve over Q")
    return C.lift(QQ)


def preimages_double(C: Curve, P: Point) -> Preimages:
    """All rational Q with 2Q = P."""
    E = _rational_curve(C)
    if P.is_infinity:
        ts = torsion_points(E, 2, QQ)
        return Preimages(list(ts.points), ts.complete)
    xp = P.x.to_fraction()
    a, b, c = E.rational_coeffs()
    # x(2Q) = x_P  <=>  x^4 - 2b x^2 - 8c x + b^2 - 4ac - 4 x_P F(x) = 0
    quartic = [b * b - 4 * a * c - 4 * xp * c, -8 * c - 4 * xp * b, -2 * b - 4 * xp * a, -4 * xp, 1]
    search = roots_in_field(quartic, QQ)
    out = []
    for x in search.roots:
        for Q in points_with_x(E, x, QQ):
            if add(E, Q, Q) == P:
                out.append(Q)
    out.sort(key=lambda q: q.sort_key())
    return Preimages(out, search.complete)


@dataclass
class BackChain:
    base: Point
    map: Endomorphism
    chain: list[Point]
    heights: list[HeightEstimate] = dc_field(default_factory=list)
    stopped_early: bool = False
    complete_search: bool = True

    @property
    def length(self) -> int:
        return len(self.chain) - 1

    @classmethod
    def from_forward(cls, f: Endomorphism, Q: Point, steps: int, tol: float = DEFAULT_TOL) -> BackChain:
        """Chain ``f^steps(Q), ..., f(Q), Q`` read backward."""
        fwd = [Q]
        for _ in range(steps):
            fwd.append(endo_eval(f, fwd[-1]))
        chain = fwd[::-1]
        return cls(chain[0], f, chain, [canonical_height(f.curve, R, tol) for R in chain])

    def forward_consistent(self) -> bool:
        return all(endo_eval(self.map, self.chain[j]) == self.chain[j - 1]
                   for j in range(1, len(self.chain)))


def back_chain(f: Endomorphism, P0: Point, depth: int, tol: float = DEFAULT_TOL) -> BackChain:
    """Longest chain ``Q_0 = P0, Q_1, ...`` of pairwise distinct rational points
    with ``2 Q_j = Q_{j-1}``, up to ``depth`` steps (depth-first, deterministic)."""
    if not (f.is_scalar and f.a_int == 2):
        raise ValueError("backward chains are implemented for [2] only")
    E = _rational_curve(f.curve)
    complete = True
    cache: dict[Point, Preimages] = {}

    def pre(P: Point) -> Preimages:
        if P not in cache:
            cache[P] = preimages_double(E, P)
        return cache[P]

    def dfs(path: list[Point]) -> list[Point]:
        nonlocal complete
        if len(path) - 1 >= depth:
            return path
        best = path
        res = pre(path[-1])
        complete &= res.complete
        for Q in res.points:
            if Q in path:
                continue
            cand = dfs(path + [Q])
            if len(cand) > len(best):
                best = cand
                if len(best) - 1 >= depth:
                    break
        return best

    chain = dfs([P0])
    heights = [canonical_height(E, Q, tol) for Q in chain]
    return BackChain(P0, f, chain, heights, len(chain) - 1 < depth, complete)


@dataclass
class DecayVerdict:
    passed: bool
    ratios: list[Optional[float]]
    residuals: list[float]
    bounds: list[float]


def decay_check(chain: BackChain, tol: float = DEFAULT_TOL) -> DecayVerdict:
    """``h^(Q_j) = h^(Q_0) / d^j`` within propagated radii."""
    d = chain.map.degree
    if d < 2:
        raise ValueError("decay needs a map of degree >= 2")
    hs = chain.heights or [canonical_height(chain.map.curve, Q, tol) for Q in chain.chain]
    h0 = hs[0]
    ok = True
    ratios, residuals, bounds = [], [], []
    for j, hj in enumerate(hs):
        target = h0.scaled(1.0 / d ** j)
        if h0.is_zero():
            good = hj.is_zero()
            res, bnd = abs(hj.value), 0.0
        else:
            res = abs(hj.value - target.value)
            bnd = hj.radius + target.radius
            good = res <= bnd
        ratios.append(None if j == 0 or hs[j - 1].value == 0 else hj.value / hs[j - 1].value)
        residuals.append(res)
        bounds.append(bnd)
        ok &= good
    return DecayVerdict(ok, ratios, residuals, bounds)


# --------------------------------------------------------------------------
# height growth


def calibrate_B(sample: Sequence[tuple[Endomorphism, Point]]) -> float:
    """Largest observed ``|h(f(Q)) - d h(Q)|`` over the calibration sample."""
    if not sample:
        raise ValueError("calibration sample is empty")
    best = 0.0
    for f, Q in sample:
        h = naive_height(f.curve, Q)
        hf = naive_height(f.curve, endo_eval(f, Q))
        best = max(best, abs(hf.value - f.degree * h.value) + h.radius * f.degree + hf.radius)
    return best


@dataclass
class GrowthVerdict:
    B_est: float
    g: float
    h0: float
    vacuous: bool
    passed: bool
    heights: list[float]


def height_growth_check(f: Endomorphism, P: Point, n: int, B_est: float) -> GrowthVerdict:
    """Check ``h(f^j(P)) > g^j h(P)`` for j = 1..n with ``g = deg f - 1/2``,
    whenever ``h(P) >= 2 B_est``."""
    d = f.degree
    if d < 2:
        raise ValueError("growth check needs a map of degree >= 2")
    g = d - 0.5
    h0 = naive_height(f.curve, P)
    if h0.upper < 2 * B_est:
        return GrowthVerdict(B_est, g, h0.value, True, True, [h0.value])
    hs = [h0.value]
    cur = P
    ok = True
    for j in range(1, n + 1):
        cur = endo_eval(f, cur)
        hj = naive_height(f.curve, cur)
        hs.append(hj.value)
        ok &= hj.lower > g ** j * h0.upper
    return GrowthVerdict(B_est, g, h0.value, False, ok, hs)
