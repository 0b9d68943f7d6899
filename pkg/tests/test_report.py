from __future__ import annotations

import json
import math
from fractions import Fraction

from hypothesis import given, strategies as st

from northcott_lab.curve import Curve
from northcott_lab.estimate import HeightEstimate
from northcott_lab.report import ExperimentReport, emit, fmt_float, fmt_fraction, normalize


def test_floats_keep_twelve_significant_digits():
    assert fmt_float(math.log(2)) == 0.69314718056
    assert fmt_float(1 / 3) == 0.333333333333
    assert fmt_float(float("inf")) == "inf" and fmt_float(float("nan")) == "nan"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_rounding_is_idempotent(v):
    assert fmt_float(fmt_float(v)) == fmt_float(v)


@given(st.fractions())
def test_fraction_format_round_trips(q):
    s = fmt_fraction(q)
    assert Fraction(s) == q
    assert ("/" in s) == (q.denominator != 1)


def test_normalize_library_values():
    C = Curve.make(0, -7, 10)
    out = normalize({"P": C.point(1, 2), "h": HeightEstimate(0.5, 1e-9), "q": Fraction(-3, 4), "t": (1, 2)})
    assert out["P"] == "(1,2)"
    assert out["h"] == {"value": 0.5, "radius": 1e-9, "exact": False}
    assert out["q"] == "-3/4" and out["t"] == [1, 2]


def report(**kw) -> ExperimentReport:
    base = dict(command="demo", config={"T": math.log(6)}, result={"n": 2, "ok": True}, version="0.1.0")
    base.update(kw)
    return ExperimentReport(**base)


def test_json_round_trip():
    rep = report(columns=["a", "b"], rows=[{"a": 1, "b": "x"}])
    data = json.loads(emit(rep))
    back = ExperimentReport.from_payload(data)
    assert emit(back) == emit(rep)
    assert back.columns == ["a", "b"]


def test_csv_with_no_rows_is_header_only():
    assert emit(report(columns=["point", "h"], rows=[]), "csv") == b"point,h\n"


def test_csv_key_value_fallback():
    out = emit(report(result={"n": 2, "inner": {"ok": True}}), "csv").decode()
    assert out.splitlines() == ["key,value", "n,2", "inner.ok,true"]


def test_emission_is_deterministic():
    assert emit(report()) == emit(report())
    assert emit(report(), "csv") == emit(report(), "csv")
