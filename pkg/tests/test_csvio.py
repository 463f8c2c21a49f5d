import math

import pytest

from bjjlab.csvio import Table, dumps, format_float, loads, read_table, write_table


def test_format_float():
    assert format_float(1 / 3) == "3.33333333333e-01"
    assert format_float(0.0) == "0.00000000000e+00"
    assert format_float(-2.5, precision=3) == "-2.50e+00"
    assert format_float(math.nan) == "nan"
    assert format_float(-math.inf) == "-inf"


def test_round_trip_byte_identical(tmp_path):
    t = Table(["a", "b"], [[1 / 3, -2e-300], [math.pi * 1e7, math.nan]], {"name": "x", "beta": "inf"})
    text = dumps(t)
    again = dumps(loads(text))
    assert again == text
    path = tmp_path / "t.csv"
    write_table(path, t)
    assert path.read_bytes() == text.encode("utf-8")
    back = read_table(path)
    assert back.metadata == {"name": "x", "beta": "inf"}
    assert back.columns == ["a", "b"]
    assert dumps(back) == text


def test_rejects_ragged_and_multiline():
    with pytest.raises(ValueError):
        dumps(Table(["a", "b"], [[1.0]]))
    with pytest.raises(ValueError):
        dumps(Table(["a"], [], {"k": "two\nlines"}))
    with pytest.raises(ValueError):
        loads("# only=metadata\n")


def test_atomic_write_leaves_no_temp(tmp_path):
    write_table(tmp_path / "a.csv", Table(["x"], [[1.0]]))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv"]
