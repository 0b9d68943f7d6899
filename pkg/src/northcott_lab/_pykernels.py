"""Pure-Python versions of the hot kernels.

These define the reference behaviour; ``_ckernels.pyx`` must return identical
results.  Both operate on plain lists of integers (``int`` or ``gmpy2.mpz``).
"""

from __future__ import annotations

from math import gcd, isqrt

BACKEND = "python"


def reduce_mod(coeffs, modulus):
    """Reduce ``coeffs`` (low degree first) modulo the monic polynomial
    ``x**D + sum(modulus[j] * x**j)`` and return the ``D`` low coefficients."""
    deg = len(modulus)
    r = list(coeffs)
    if len(r) < deg:
        return r + [0] * (deg - len(r))
    nz = [(j, m) for j, m in enumerate(modulus) if m]
    for i in range(len(r) - 1, deg - 1, -1):
        c = r[i]
        if c:
            base = i - deg
            for j, m in nz:
                r[base + j] -= c * m
    return r[:deg]


def mulmod(a, b, modulus):
    """Product of two coefficient lists reduced modulo a monic polynomial."""
    la, lb = len(a), len(b)
    out = [0] * (la + lb - 1)
    for i in range(la):
        ai = a[i]
        if ai:
            for j in range(lb):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
    return reduce_mod(out, modulus)


def square_candidates(lead, a, b, c, bound):
    """Integer search behind rational-point enumeration on ``y^2 = F(x)``.

    ``F(x) = (lead*x^3 + a*x^2 + b*x + c) / lead`` with integer coefficients.
    Returns every ``(p, q, r)`` with ``gcd(p, q) == 1``, ``|p| <= bound``,
    ``1 <= q <= bound`` and ``r = isqrt(s)`` exact for
    ``s = (lead*p^3 + a*p^2*q + b*p*q^2 + c*q^3) * lead * q >= 0``.
    """
    found = []
    for q in range(1, bound + 1):
        q2 = q * q
        q3 = q2 * q
        for p in range(-bound, bound + 1):
            if gcd(p, q) != 1:
                continue
            s = (lead * p * p * p + a * p * p * q + b * p * q2 + c * q3) * lead * q
            if s < 0:
                continue
            r = isqrt(s)
            if r * r == s:
                found.append((p, q, r))
    return found
