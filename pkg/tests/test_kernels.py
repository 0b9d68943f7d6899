from __future__ import annotations

import os
import subprocess
import sys

import gmpy2
import pytest
from hypothesis import given, strategies as st

from northcott_lab import _pykernels, kernels

ck = pytest.importorskip("northcott_lab._ckernels")

ints = st.integers(-10 ** 30, 10 ** 30)
monic_tails = st.lists(st.integers(-5, 5), min_size=1, max_size=8)


@given(monic_tails, st.data())
def test_mulmod_parity(mod, data):
    D = len(mod)
    a = data.draw(st.lists(ints, min_size=D, max_size=D))
    b = data.draw(st.lists(ints, min_size=D, max_size=D))
    want = _pykernels.mulmod(a, b, mod)
    assert list(ck.mulmod(a, b, mod)) == want
    assert list(ck.mulmod([gmpy2.mpz(v) for v in a], b, mod)) == want


@given(monic_tails, st.lists(ints, max_size=20))
def test_reduce_mod_parity(mod, coeffs):
    assert list(ck.reduce_mod(coeffs, mod)) == _pykernels.reduce_mod(coeffs, mod)


def test_reduce_mod_matches_polynomial_division():
    # x^5 mod x^2 + 1 is x
    assert _pykernels.reduce_mod([0, 0, 0, 0, 0, 1], [1, 0]) == [0, 1]
    assert _pykernels.reduce_mod([3], [1, 0]) == [3, 0]


@given(st.integers(1, 3), st.integers(-6, 6), st.integers(-9, 9), st.integers(-9, 9), st.integers(1, 12))
def test_square_candidates_parity(lead, a, b, c, bound):
    assert [tuple(t) for t in ck.square_candidates(lead, a, b, c, bound)] == \
        _pykernels.square_candidates(lead, a, b, c, bound)


@pytest.mark.skipif(os.environ.get("NORTHCOTT_LAB_PURE", "") not in ("", "0"), reason="pure backend forced")
def test_compiled_backend_is_selected_by_default():
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("flag, backend", [("1", "python"), ("0", "cython")])
def test_environment_switch(flag, backend):
    env = dict(os.environ, NORTHCOTT_LAB_PURE=flag)
    out = subprocess.run([sys.executable, "-c", "import northcott_lab; print(northcott_lab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == backend
