# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels.

Same contracts as ``_pykernels``.  Each routine first tries a machine-integer
path (64-bit inputs, 128-bit accumulation, overflow checked) and falls back to
arbitrary-precision object arithmetic when the values do not fit.
"""

from libc.math cimport sqrtl
from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef long long int128 "__int128"

BACKEND = "cython"

cdef long long _LIM = (1LL << 62)
cdef int128 _ACC_LIM = (<int128>1) << 120


cdef list _reduce_obj(list r, list modulus):
    cdef Py_ssize_t deg = len(modulus)
    cdef Py_ssize_t i, j, base
    cdef object c, m
    cdef list nz_idx = []
    cdef list nz_val = []
    for j in range(deg):
        if modulus[j]:
            nz_idx.append(j)
            nz_val.append(modulus[j])
    cdef Py_ssize_t nnz = len(nz_idx)
    cdef Py_ssize_t t
    for i in range(len(r) - 1, deg - 1, -1):
        c = r[i]
        if c:
            base = i - deg
            for t in range(nnz):
                j = nz_idx[t]
                r[base + j] = r[base + j] - c * nz_val[t]
    return r[:deg]


cdef object _mulmod_small(list a, list b, list modulus):
    """Machine-integer path; returns None when any bound is exceeded."""
    cdef Py_ssize_t la = len(a), lb = len(b), deg = len(modulus)
    cdef Py_ssize_t n = la + lb - 1
    cdef Py_ssize_t i, j, base
    cdef int128 c, v
    cdef long long ai
    cdef list out
    if la == 0 or lb == 0 or deg == 0:
        return None
    ma = max([abs(v_obj) for v_obj in a])
    mb = max([abs(v_obj) for v_obj in b])
    mm = max([abs(v_obj) for v_obj in modulus])
    if ma >= _LIM or mb >= _LIM or mm >= _LIM:
        return None
    if int(ma).bit_length() + int(mb).bit_length() + int(min(la, lb)).bit_length() > 118:
        return None
    cdef long long *A = <long long *> malloc(la * sizeof(long long))
    cdef long long *B = <long long *> malloc(lb * sizeof(long long))
    cdef long long *M = <long long *> malloc(deg * sizeof(long long))
    cdef int128 *R = <int128 *> malloc((n if n > deg else deg) * sizeof(int128))
    if A == NULL or B == NULL or M == NULL or R == NULL:
        free(A); free(B); free(M); free(R)
        raise MemoryError()
    try:
        for i in range(la):
            A[i] = a[i]
        for j in range(lb):
            B[j] = b[j]
        for j in range(deg):
            M[j] = modulus[j]
        for i in range(n if n > deg else deg):
            R[i] = 0
        for i in range(la):
            ai = A[i]
            if ai == 0:
                continue
            for j in range(lb):
                R[i + j] += (<int128> ai) * B[j]
        for i in range(n):
            if R[i] >= _ACC_LIM or R[i] <= -_ACC_LIM:
                return None
        for i in range(n - 1, deg - 1, -1):
            c = R[i]
            if c == 0:
                continue
            if c >= _LIM or c <= -_LIM:
                return None
            base = i - deg
            for j in range(deg):
                if M[j]:
                    v = R[base + j] - c * M[j]
                    if v >= _ACC_LIM or v <= -_ACC_LIM:
                        return None
                    R[base + j] = v
        out = []
        for i in range(deg):
            if i < n:
                v = R[i]
            else:
                v = 0
            if v >= _LIM or v <= -_LIM:
                return None
            out.append(<long long> v)
        return out
    finally:
        free(A); free(B); free(M); free(R)


def reduce_mod(coeffs, modulus):
    cdef list r = list(coeffs)
    cdef list mod = list(modulus)
    cdef Py_ssize_t deg = len(mod)
    if len(r) < deg:
        return r + [0] * (deg - len(r))
    return _reduce_obj(r, mod)


def mulmod(a, b, modulus):
    cdef list la = list(a)
    cdef list lb = list(b)
    cdef list mod = list(modulus)
    res = _mulmod_small(la, lb, mod)
    if res is not None:
        return res
    cdef Py_ssize_t na = len(la), nb = len(lb)
    cdef Py_ssize_t i, j
    cdef list out = [0] * (na + nb - 1)
    cdef object ai, bj
    for i in range(na):
        ai = la[i]
        if ai:
            for j in range(nb):
                bj = lb[j]
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    if len(out) < len(mod):
        return out + [0] * (len(mod) - len(out))
    return _reduce_obj(out, mod)


cdef inline long long _gcd_ll(long long x, long long y):
    cdef long long t
    if x < 0:
        x = -x
    while y:
        t = x % y
        x = y
        y = t
    return x


cdef inline long long _isqrt128(int128 s):
    """Floor square root of 0 <= s < 2**120, or -1 when s is not a square."""
    cdef long long r = <long long> sqrtl(<long double> s)
    cdef int128 rr
    while r > 0 and (<int128> r) * r > s:
        r -= 1
    while (<int128> (r + 1)) * (r + 1) <= s:
        r += 1
    rr = (<int128> r) * r
    if rr == s:
        return r
    return -1


def square_candidates(lead, a, b, c, bound):
    cdef long long L, A, B, C, H
    cdef long long p, q, r
    cdef int128 q2, q3, s, pp
    cdef list found = []
    big = max(abs(lead), abs(a), abs(b), abs(c))
    if big >= (1 << 28) or bound >= (1 << 15) or bound < 0:
        from ._pykernels import square_candidates as slow
        return slow(lead, a, b, c, bound)
    L = lead; A = a; B = b; C = c; H = bound
    for q in range(1, H + 1):
        q2 = (<int128> q) * q
        q3 = q2 * q
        for p in range(-H, H + 1):
            if _gcd_ll(p, q) != 1:
                continue
            pp = <int128> p
            s = (L * pp * pp * pp + A * pp * pp * q + B * pp * q2 + C * q3) * L * q
            if s < 0:
                continue
            r = _isqrt128(s)
            if r >= 0:
                found.append((p, q, r))
    return found
