import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from entroprel.cli import EXIT_INPUT, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, bundled_case_study, run_cli

from conftest import PUBLISHED_MULTIPLIERS, PUBLISHED_TABLE

GOLDEN = Path(__file__).parent / "golden"
PUBLISHED_ARGS = ["--lambda1", "-7.0859", "--lambda2", "0.39360"]


@pytest.fixture
def raw():
    return json.loads(bundled_case_study().read_text())


def _write(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_evaluate_matches_golden(capsys, tmp_path):
    code = run_cli(["evaluate", "@case_study", *PUBLISHED_ARGS, "--out", str(tmp_path)])
    assert code == EXIT_OK
    golden = (GOLDEN / "failure_table.csv").read_bytes()
    assert capsys.readouterr().out.encode() == golden
    assert (tmp_path / "failure_table.csv").read_bytes() == golden


def test_golden_matches_table():
    rows = (GOLDEN / "failure_table.csv").read_text().splitlines()[1:]
    values = np.array([[float(c) for c in r.split(",")[1:]] for r in rows])
    assert np.allclose(values, PUBLISHED_TABLE, atol=1e-4)


def test_evaluate_by_path_equals_alias(capsys):
    run_cli(["evaluate", "@case_study", *PUBLISHED_ARGS])
    alias = capsys.readouterr().out
    run_cli(["evaluate", str(bundled_case_study()), *PUBLISHED_ARGS])
    assert capsys.readouterr().out == alias


def test_evaluate_json_format(capsys):
    assert run_cli(["evaluate", "@case_study", *PUBLISHED_ARGS, "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["multipliers"] == {"lambda1": PUBLISHED_MULTIPLIERS.lambda1, "lambda2": PUBLISHED_MULTIPLIERS.lambda2}
    assert doc["entries"][3][4] == pytest.approx(0.988699, abs=1e-4)


def test_evaluate_invalid_multipliers_exit_3(capsys):
    assert run_cli(["evaluate", "@case_study", "--lambda1", "1", "--lambda2", "1"]) == EXIT_INVALID


def test_charging_time(capsys):
    assert run_cli(["charging-time", "@case_study"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "energy_needed_kwh=60.000000"
    assert 2.99 <= float(out[1].split("=")[1]) <= 3.01
    assert out[2] == "stress_levels=5"


def test_charging_time_without_block(raw, tmp_path, capsys):
    del raw["charging"]
    assert run_cli(["charging-time", _write(tmp_path, raw)]) == EXIT_INPUT
    assert "charging" in capsys.readouterr().err


def test_solve_writes_outputs(tmp_path, capsys):
    assert run_cli(["solve", "@case_study", "--out", str(tmp_path)]) == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["component_failure.csv", "failure_table.csv", "multipliers.json", "reliability_curve.csv"]
    summary = json.loads((tmp_path / "multipliers.json").read_text())
    assert summary["validity"]["overall_valid"] is True
    assert summary["convergence_reason"] == "FunctionTolerance"
    assert summary["weakest_component"] == "Charging Station"
    assert (tmp_path / "reliability_curve.csv").read_text().startswith("stress_level,R_j\n")


def test_solve_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(["solve", "@case_study", "--out", str(a)])
    run_cli(["solve", "@case_study", "--out", str(b)])
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_solve_empty_components_exit_1(raw, tmp_path, capsys):
    raw["components"] = []
    raw["stress_matrix"] = []
    assert run_cli(["solve", _write(tmp_path, raw)]) == EXIT_INPUT
    assert "ShapeError" in capsys.readouterr().err


def test_solve_max_iterations_exit_2(raw, tmp_path, capsys):
    raw["optimizer"] = {"max_iterations": 1, "function_tolerance": 1e-300}
    assert run_cli(["solve", _write(tmp_path, raw)]) == EXIT_NOT_CONVERGED


def test_solve_invalid_result_exit_3(raw, tmp_path, capsys):
    # with no margin and no hinge weight the optimum leaves Case 2
    raw["optimizer"] = {"constraint_penalty": 1e-12, "constraint_margin": 0.0, "lambda1_bounds": [-3, -0.5],
                        "lambda2_bounds": [0.1, 3]}
    assert run_cli(["solve", _write(tmp_path, raw)]) == EXIT_INVALID


def test_unreadable_file_exit_1(tmp_path, capsys):
    assert run_cli(["solve", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert "ParseError" in capsys.readouterr().err


def test_usage_error_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        run_cli(["evaluate", "@case_study"])
    assert info.value.code == EXIT_INPUT


def test_oracle(capsys):
    code = run_cli(["oracle", "@case_study", "--steps", "60",
                    "--lambda1-range", "-30", "-0.5", "--lambda2-range", "0.1", "2"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["optimizer_not_dominated"] is True
    assert report["grid"]["refinement_rounds"] > 0
    assert report["dominance_gap"] <= 1e-3


def test_report_writes_plot_tables(tmp_path, capsys):
    out = tmp_path / "rep"
    assert run_cli(["report", "@case_study", *PUBLISHED_ARGS, "--out", str(out)]) == EXIT_OK
    assert (out / "stress_table.csv").exists()
    curve = (out / "reliability_curve.csv").read_text().splitlines()
    assert float(curve[-1].split(",")[1]) == pytest.approx(0.00116, abs=1e-4)
    weakest = [r for r in (out / "component_failure.csv").read_text().splitlines() if r.endswith("true")]
    assert weakest == [r for r in weakest if r.startswith("Charging Station,")] and len(weakest) == 1


def test_report_needs_both_multipliers(tmp_path, capsys):
    assert run_cli(["report", "@case_study", "--lambda1", "-7", "--out", str(tmp_path)]) == EXIT_INPUT


def test_logging_goes_to_stderr(monkeypatch, capsys):
    monkeypatch.setenv("ENTROPREL_LOG", "info")
    run_cli(["solve", "@case_study"])
    captured = capsys.readouterr()
    assert "stopped after" in captured.err
    assert "stopped after" not in captured.out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "entroprel", "charging-time", "@case_study"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "stress_levels=5" in proc.stdout
