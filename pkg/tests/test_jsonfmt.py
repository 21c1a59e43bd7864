import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qslkit._jsonfmt import dumps, format_float, parse_number


def test_format_float_basics():
    assert format_float(0.0) == "0"
    assert format_float(1.0) == "1"
    assert format_float(0.5) == "0.5"
    assert format_float(math.inf) == '"inf"'
    assert format_float(-math.inf) == '"-inf"'


def test_format_float_rejects_nan():
    with pytest.raises(ValueError):
        format_float(math.nan)


def test_parse_number_inverts_infinities():
    assert parse_number("inf") == math.inf
    assert parse_number("-inf") == -math.inf
    assert parse_number(2.5) == 2.5


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip_is_exact(x):
    text = format_float(x)
    assert float(text) == x


def test_dumps_layout_is_stable():
    obj = {"a": 1, "b": [1.0, 2.5], "c": {"d": None, "e": True}, "f": "x"}
    assert dumps(obj) == dumps(obj)
    parsed = json.loads(dumps(obj))
    assert parsed == {"a": 1, "b": [1, 2.5], "c": {"d": None, "e": True}, "f": "x"}


def test_dumps_is_valid_json_with_infinities_as_strings():
    parsed = json.loads(dumps({"t": math.inf}))
    assert parsed["t"] == "inf"


def test_dumps_rejects_non_string_keys():
    with pytest.raises(TypeError):
        dumps({1: "x"})


def test_dumps_ends_with_newline():
    assert dumps({}).endswith("\n")
