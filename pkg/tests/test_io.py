import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orkit import io, orsys, repro
from orkit.errors import SchemaError

LINEAR = {"type": "linear", "A": [[0, 1], [-2, -3]], "B": [[0], [1]], "H": [[1, 0]]}


def test_parse_rational_strings():
    M = io.parse_matrix([["-3/4", "0.225"], [1, "2"]])
    assert M.tolist() == [[Fraction(-3, 4), Fraction(9, 40)], [1, 2]]
    assert io.parse_vector(["1/2", 3]).tolist() == [Fraction(1, 2), 3]


def test_parse_column_vector_as_matrix():
    assert io.parse_matrix([1, 2, 3], column=True).shape == (3, 1)


def test_load_every_bundled_example():
    for name in repro.example_names():
        ld = repro.load_example(name)
        assert ld.get("name") == name


@pytest.mark.parametrize("doc, where", [
    ({"A": [[1]]}, "(root)"),
    ({"type": "linear", "A": [[1]], "B": [[1]]}, "(root)"),
    ({"type": "linear", "A": [["x"]], "B": [[1]], "H": [[1]]}, "A"),
    ({"type": "linear", "A": [[1]], "B": [[1]], "H": [[1]], "bogus": 1}, "(root)"),
    ({"type": "nope"}, "type"),
    ({"type": "linear", "A": [[1, 2]], "B": [[1]], "H": [[1]]}, "linear"),
    ({"type": "linear", "A": [[1, 2], [3]], "B": [[1], [1]], "H": [[1, 1]]}, "linear"),
    ({"type": "poly_affine", "f": ["x1 + y"], "h": ["x1"]}, "poly_affine"),
    ({"type": "poly_affine", "f": ["x1"], "h": ["x1 + 1"]}, "poly_affine"),
])
def test_schema_errors(doc, where):
    with pytest.raises(SchemaError) as err:
        io.from_dict(doc)
    assert where in str(err.value)


def test_invalid_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"type": "linear",\n "A": [[1]')
    with pytest.raises(SchemaError) as err:
        io.load(p)
    assert "line 2" in str(err.value)


def test_top_level_must_be_object(tmp_path):
    p = tmp_path / "list.json"
    p.write_text("[1, 2]")
    with pytest.raises(SchemaError):
        io.load(p)


def test_round_trip_linear(tmp_path):
    doc = dict(LINEAR, A=[["1/3", 1], [-2, "0.5"]], disturbances=[[1, 0]], time="discrete")
    rec = io.from_dict(doc).record
    again = io.from_dict(json.loads(io.dump(io.to_dict(rec)))).record
    assert np.array_equal(rec.A, again.A) and np.array_equal(rec.H, again.H)
    assert again.time == "discrete" and np.array_equal(again.disturbances[0], rec.disturbances[0])


def test_round_trip_singular_poly_and_so(examples):
    for name in ("singular_deficient", "poly_feedback", "so_projection"):
        rec = examples[name].record
        again = io.from_dict(io.to_dict(rec)).record
        assert io.to_dict(again) == io.to_dict(rec)


def test_or_file_round_trip(examples):
    o = orsys.or_feedback(examples["feedback_closure"].record)
    doc = io.or_to_dict(o)
    back = io.from_dict(json.loads(io.dump(doc)))
    assert np.array_equal(back.record.A, o.L)
    assert io.parse_matrix(back.get("or_system")["feedback_F"]).tolist() == o.feedback_F.tolist()


def test_scalar_json():
    assert io.scalar_json(Fraction(3, 1)) == 3
    assert io.scalar_json(Fraction(-1, 8)) == "-1/8"
    assert io.scalar_json(np.int64(2)) == 2
    assert io.scalar_json(0.25) == 0.25


small = st.fractions(min_value=-10, max_value=10, max_denominator=9)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=1, max_size=1), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=2))))
def test_linear_round_trip_property(data):
    A, B, H = data
    rec = orsys.LinearSystem(A, B, H)
    back = io.from_dict(json.loads(io.dump(io.to_dict(rec)))).record
    for a, b in ((rec.A, back.A), (rec.B, back.B), (rec.H, back.H)):
        assert np.array_equal(a, b)
