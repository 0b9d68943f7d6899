from __future__ import annotations

from fractions import Fraction

from hypothesis import settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

small_q = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_q = small_q.filter(lambda q: q != 0)


def coords(n: int, lo: int = -6, hi: int = 6):
    return st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=5), min_size=n, max_size=n)


def frac(s: str) -> Fraction:
    return Fraction(s)
