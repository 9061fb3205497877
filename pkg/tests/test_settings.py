import json
import math

import numpy as np
import pytest

from config.settings import GridAxis, GridSpec, Tolerances, load_run_config
from utils.exceptions import MalformedInputError
from utils.serialization import format_number, to_csv, to_json


def test_grid_axis_values():
    assert GridAxis.parse("1:3:5").values() == [1.0, 1.5, 2.0, 2.5, 3.0]
    assert GridAxis.parse("inf").values() == [math.inf]


def test_grid_axis_rejects_infinite_range():
    with pytest.raises(ValueError):
        GridAxis.parse("1:inf:3").values()


def test_grid_spec_parse():
    grid = GridSpec.parse("d=1:3:21, m=2:3:11, g=1:4:4")
    assert grid.d.count == 21 and grid.m.start == 2.0 and grid.g.stop == 4.0


def test_run_config_defaults():
    config = load_run_config(None, {"command": "classify"})
    assert config.trunc == 80
    assert config.budget == 4000
    assert config.which == "all"
    assert config.tolerances == Tolerances()


def test_tolerance_override():
    config = load_run_config(None, {"command": "measure", "tolerances": {"predicate_tol": 1e-6}})
    assert config.tolerances.predicate_tol == 1e-6
    assert config.tolerances.oracle_tolerance == 1e-4


@pytest.mark.parametrize(
    "overrides",
    [
        {"command": "unknown"},
        {"command": "sweep", "grid": "d=1"},
        {"command": "oracle-compare", "trunc": 0},
        {"command": "sweep", "format": "xml"},
        {"command": "classify", "format": "csv"},
        {"command": "oracle-compare", "format": "csv"},
    ],
)
def test_run_config_rejects(overrides):
    with pytest.raises(MalformedInputError):
        load_run_config(None, overrides)


@pytest.mark.parametrize(
    "value,expected",
    [(0.1, "0.1"), (1.0, "1"), (-0.0, "0"), (1 / 3, "0.333333333333"), (1e-20, "1e-20"), (math.inf, "inf")],
)
def test_format_number(value, expected):
    assert format_number(value) == expected


def test_to_json_layout():
    text = to_json({"value": np.float64(0.5), "pair": (0.0, 1.2), "flag": np.bool_(True), "none": None})
    assert text == '{\n  "value": 0.5,\n  "pair": [0, 1.2],\n  "flag": true,\n  "none": null\n}\n'


def test_to_json_nested():
    text = to_json({"rows": [{"a": 1}]})
    assert text == '{\n  "rows": [\n    {\n      "a": 1\n    }\n  ]\n}\n'


def test_to_csv():
    assert to_csv(["a", "b"], [[1.0, True], [0.25, None]]) == "a,b\n1,true\n0.25,\n"


def test_csv_format_allowed_for_sweep():
    config = load_run_config(None, {"command": "sweep", "grid": "d=1,m=2,g=1", "format": "csv"})
    assert config.format == "csv"


def test_to_json_escapes_control_characters():
    text = to_json({"tab\tkey": "a\tb\x01c", "name": "сжатие \"m\""})
    assert json.loads(text) == {"tab\tkey": "a\tb\x01c", "name": "сжатие \"m\""}
    assert '"tab\\tkey": "a\\tb\\u0001c"' in text
    assert "сжатие" in text
