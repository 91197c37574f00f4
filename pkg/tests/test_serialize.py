"""JSON/CSV round-trips must be lossless and byte-deterministic."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apspec.errors import MalformedInput
from apspec.frequency import ExactFrequency as EF
from apspec.periodic import fejer_riesz
from apspec.sampling import SampledFunction
from apspec.serialize import (
    dumps,
    growth_table_text,
    loads,
    report_from_json,
    report_to_json,
    sampled_csv_text,
    sampled_from_json,
    sampled_to_json,
    trigpoly_from_json,
    trigpoly_to_json,
)
from apspec.trigpoly import TrigPoly


def two_two_cos() -> TrigPoly:
    return TrigPoly([(EF(-1), 1.0), (EF(0), 2.0), (EF(1), 1.0)])


def test_trigpoly_roundtrip_with_radicals():
    f = TrigPoly(
        [
            (EF(Fraction(-3, 7)), complex(0.1, -2.5)),
            (EF.sqrt_of(2, Fraction(5, 3)), complex(-1e-17, 0.25)),
            (EF(0) + EF.sqrt_of(3), complex(math.pi, 0.0)),
        ]
    )
    back = trigpoly_from_json(trigpoly_to_json(f))
    assert back == f


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.fractions(min_value=-50, max_value=50, max_denominator=40),
            st.floats(-1e6, 1e6, allow_nan=False),
            st.floats(-1e6, 1e6, allow_nan=False),
        ),
        min_size=0,
        max_size=12,
    )
)
def test_trigpoly_roundtrip_random(terms):
    f = TrigPoly([(EF(q), complex(a, b)) for q, a, b in terms])
    assert trigpoly_from_json(trigpoly_to_json(f)) == f


def test_trigpoly_json_is_canonical_and_exact():
    f = two_two_cos()
    g = TrigPoly(list(reversed(f.sorted_terms())))
    assert dumps(trigpoly_to_json(f)) == dumps(trigpoly_to_json(g))
    obj = trigpoly_to_json(f)
    # rationals as strings, never floats
    assert obj["terms"][0]["freq"]["rat"] == "-1"


def test_trigpoly_bad_payloads():
    with pytest.raises(MalformedInput):
        trigpoly_from_json({"nope": []})
    with pytest.raises(MalformedInput):
        trigpoly_from_json({"terms": [{"freq": {"rat": "x/y", "rad": []}, "re": 0, "im": 0}]})
    with pytest.raises(MalformedInput):
        loads("{not json")


def test_sampled_roundtrip_and_csv():
    vals = np.exp(1j * np.linspace(0, 1, 9)) * np.arange(9)
    s = SampledFunction(2.0, 0.5, vals)
    back = sampled_from_json(sampled_to_json(s))
    assert back.halfwidth == s.halfwidth and back.step == s.step
    assert np.array_equal(back.values, s.values)
    text = sampled_csv_text(s)
    lines = text.strip().splitlines()
    assert lines[0] == "x,re,im"
    assert len(lines) == 10
    x0, re0, im0 = lines[1].split(",")
    assert float(x0) == -2.0 and float(re0) == 0.0 and float(im0) == 0.0
    # repr round-trip keeps samples exact
    row = lines[5].split(",")
    assert complex(float(row[1]), float(row[2])) == s.values[4]


def test_csv_row_cap():
    n = (1 << 20) + 1
    s = SampledFunction((n - 1) * 0.5 / 2.0, 0.5, np.zeros(n, dtype=complex))
    with pytest.raises(MalformedInput):
        sampled_csv_text(s)
    assert sampled_csv_text(s, allow_large=True).count("\n") == n + 1


def test_report_roundtrip():
    rep = fejer_riesz(two_two_cos())
    back = report_from_json(report_to_json(rep))
    assert back.method == rep.method
    assert back.residual_sup == rep.residual_sup
    assert back.bandwidth_ratio == rep.bandwidth_ratio
    assert back.factor == rep.factor
    assert [(c.name, c.passed, c.value) for c in back.checks] == [
        (c.name, c.passed, c.value) for c in rep.checks
    ]


def test_dumps_shape():
    text = dumps({"a": 1.5})
    assert text.endswith("\n")
    assert json.loads(text) == {"a": 1.5}
    with pytest.raises(MalformedInput):
        dumps(float("nan"))


def test_growth_table_text():
    text = growth_table_text([(2, 1 / (4 * math.log(2)))])
    lines = text.strip().splitlines()
    assert lines[0] == "n,wiener_norm"
    n, v = lines[1].split(",")
    assert int(n) == 2 and float(v) == 1 / (4 * math.log(2))
