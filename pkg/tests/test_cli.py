import json

import pytest

from distances.noise import SWEEP_COLUMNS
from main import main

VACUUM_CLASSIFY = """{
  "class": "PureCoherent",
  "symplectic_spectrum": [1],
  "d": 1,
  "m": 1,
  "theta": 0
}
"""

SQUEEZED_MEASURE = """{
  "chi": 0.8,
  "phi": 0.8,
  "delta_bounds_fidelity": [0.211145618, 0.894427191],
  "delta_bounds_overlap": [0.4, 1.2]
}
"""

VACUUM_THERMAL_MEASURE = """{
  "fidelity": 0.5,
  "holevo": 0.707106781187,
  "delta_bounds_fidelity": [0.585786437627, 1.41421356237],
  "delta_bounds_overlap": [0.585786437627, 1.41421356237]
}
"""

SQUEEZED_VACUUM_SWEEP = (
    "d,m,g,gamma_d,gamma_m,classical_after,chi_before,chi_after,phi_before,phi_after,eq64_lhs,eq64_rhs\n"
    "1,2,1,2.5,1.41421356237,true,0.8,1,0.8,1,1.11803398875,0.9\n"
    "1,2,4,1.45773797371,1.70747648517,false,0.8,0.942809041582,0.8,0.923526618619,1.0307764064,0.874642784227\n"
)

VACUUM_THERMAL_ORACLE = """{
  "trunc": 80,
  "tolerance": 0.0001,
  "measures": {
    "fidelity": {
      "analytic": 0.5,
      "oracle": 0.5,
      "abs_diff": 0
    },
    "holevo": {
      "analytic": 0.707106781187,
      "oracle": 0.707106781187,
      "abs_diff": 0
    }
  },
  "within_tolerance": true
}
"""


@pytest.fixture
def state_file(tmp_path):
    """Фабрика JSON файлов состояний"""

    def factory(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
        return str(path)

    return factory


@pytest.fixture
def vacuum(state_file):
    return state_file("vacuum.json", {"modes": 1, "A": [[1, 0], [0, 1]]})


@pytest.fixture
def thermal(state_file):
    return state_file("thermal.json", {"modes": 1, "A": [[3, 0], [0, 3]]})


@pytest.fixture
def squeezed(state_file):
    return state_file("squeezed.json", {"one_mode": {"d": 1, "m": 2, "theta": 0}})


def test_classify_vacuum_golden(vacuum, capsys):
    assert main(["classify", "--input", vacuum]) == 0
    assert capsys.readouterr().out == VACUUM_CLASSIFY


def test_classify_invalid_state(state_file, capsys):
    path = state_file("invalid.json", {"A": [[2, 0], [0, 0.4]]})
    assert main(["classify", "--input", path]) == 3
    assert json.loads(capsys.readouterr().out)["class"] == "Invalid"


def test_classify_writes_out_file(vacuum, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["classify", "--input", vacuum, "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == VACUUM_CLASSIFY
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize(
    "payload",
    [
        "{not json",
        {"modes": 1, "A": [[1, 0, 0], [0, 1, 0]]},
        {"A": [[1, 0.5], [0, 1]]},
    ],
)
def test_malformed_input_exit_code(state_file, payload):
    path = state_file("bad.json", payload)
    assert main(["classify", "--input", path]) == 2


def test_missing_input_exit_code():
    assert main(["measure"]) == 2


def test_measure_single_state(squeezed, capsys):
    assert main(["measure", "--input", squeezed]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["chi"] == pytest.approx(0.8)
    assert report["phi"] == pytest.approx(0.8)
    assert report["delta_bounds_overlap"] == pytest.approx([0.4, 1.2])


def test_measure_pair(vacuum, thermal, capsys):
    assert main(["measure", "--input", vacuum, "--second", thermal, "--which", "fidelity"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == {"fidelity": pytest.approx(0.5), "delta_bounds_fidelity": pytest.approx([2 - 2 ** 0.5, 2 ** 0.5])}


def test_measure_invalid_second_state(vacuum, state_file):
    path = state_file("invalid.json", {"A": [[2, 0], [0, 0.4]]})
    assert main(["measure", "--input", vacuum, "--second", path]) == 3


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--grid", "d=1:2:2,m=2,g=1:inf:1", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 3
    assert lines[1].split(",")[:3] == ["1", "2", "1"]


def test_sweep_json_with_threads(capsys):
    assert main(["sweep", "--grid", "d=1,m=1:2:3,g=inf", "--format", "json", "--workers", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["columns"] == SWEEP_COLUMNS
    assert [row["m"] for row in report["rows"]] == [1, 1.5, 2]


@pytest.mark.parametrize("grid", ["d=1:2", "d=1,m=1", "d=0.5,m=1,g=1", "x=1,m=1,g=1"])
def test_sweep_bad_grid(grid):
    assert main(["sweep", "--grid", grid]) == 2


def test_optimize(squeezed, capsys):
    assert main(["optimize", "--input", squeezed, "--which", "fidelity", "--budget", "800"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert list(report) == ["fidelity"]
    assert report["fidelity"]["value"] == pytest.approx(0.8, abs=1e-6)


def test_optimize_rejects_measure(squeezed):
    assert main(["optimize", "--input", squeezed, "--which", "chi"]) == 2


def test_oracle_compare_pair(vacuum, thermal, capsys):
    assert main(["oracle-compare", "--input", vacuum, "--second", thermal, "--trunc", "40"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["within_tolerance"] is True
    assert set(report["measures"]) == {"fidelity", "holevo"}


def test_oracle_compare_single_state(thermal, capsys):
    assert main(["oracle-compare", "--input", thermal, "--trunc", "60"]) == 0
    assert "trace_sqrt" in json.loads(capsys.readouterr().out)["measures"]


def test_oracle_compare_truncation_too_small(state_file):
    path = state_file("hot.json", {"one_mode": {"d": 9, "m": 1.5, "theta": 0}})
    assert main(["oracle-compare", "--input", path, "--trunc", "4"]) == 4


def test_trunc_below_two_is_malformed(vacuum):
    assert main(["oracle-compare", "--input", vacuum, "--trunc", "1"]) == 2


def test_config_file_and_flag_precedence(tmp_path, squeezed, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"which": "holevo", "budget": 300, "seed": 2}), encoding="utf-8")
    assert main(["optimize", "--input", squeezed, "--config", str(config), "--which", "fidelity"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert list(report) == ["fidelity"]
    assert report["fidelity"]["iterations"] <= 300


def test_broken_config_file(tmp_path, vacuum):
    config = tmp_path / "run.json"
    config.write_text("[", encoding="utf-8")
    assert main(["classify", "--input", vacuum, "--config", str(config)]) == 2


def test_measure_squeezed_vacuum_golden(squeezed, capsys):
    assert main(["measure", "--input", squeezed]) == 0
    assert capsys.readouterr().out == SQUEEZED_MEASURE


def test_measure_vacuum_thermal_golden(vacuum, thermal, capsys):
    assert main(["measure", "--input", vacuum, "--second", thermal]) == 0
    assert capsys.readouterr().out == VACUUM_THERMAL_MEASURE


def test_sweep_golden(capsys):
    assert main(["sweep", "--grid", "d=1,m=2,g=1:4:2"]) == 0
    first = capsys.readouterr().out
    assert first == SQUEEZED_VACUUM_SWEEP
    assert main(["sweep", "--grid", "d=1,m=2,g=1:4:2"]) == 0
    assert capsys.readouterr().out == first


def test_oracle_compare_golden(vacuum, thermal, capsys):
    assert main(["oracle-compare", "--input", vacuum, "--second", thermal, "--trunc", "80"]) == 0
    assert capsys.readouterr().out == VACUUM_THERMAL_ORACLE


@pytest.mark.parametrize("command", ["classify", "measure", "optimize", "oracle-compare"])
def test_csv_format_rejected_outside_sweep(command, squeezed):
    assert main([command, "--input", squeezed, "--format", "csv"]) == 2
