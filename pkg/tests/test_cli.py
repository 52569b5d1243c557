import json
import os

import numpy as np
import pytest
import yaml

from cli.commands import RunReport, format_report, parse_floats
from controls.classification_controller import FLAGS
from main import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, run
from memory.session_memory import remember_residual, session_memory
from utils.exceptions import UsageError

DISTINGUISHED_B = "2,0,0,0,2,0,0,0,2"


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"cache": {"enabled": True, "directory": str(tmp_path / "cache")},
                                    "sweep": {"default_count": 4}}))
    monkeypatch.setenv("SASAKI_CONFIG", str(path))
    monkeypatch.delenv("SASAKI_BUDGET", raising=False)
    return tmp_path


def run_json(capsys, *argv):
    code = run([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_build_report(capsys):
    code, report = run_json(capsys, "build", "sp:1")
    assert code == EXIT_OK
    assert report["schema"] == "1"
    assert report["pass"] is True
    assert report["results"]["dims"] == {"g": 10, "h": 3, "m": 7}
    assert report["residuals"]["kashiwada"] < 1e-8


def test_text_report(capsys):
    assert run(["build", "su:3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "BUILD REPORT - su:3" in out
    assert "dim g = 8, dim h = 1, dim m = 7" in out


@pytest.mark.parametrize("argv", [
    ["build", "so:6"],
    ["build", "sp:0"],
    ["build", "x:3"],
    ["classify", "sp:1", "--B", "1,2"],
    ["classify", "sp:1", "--B", "1,2,3,4,5,6,7,8,nine"],
    ["classify", "sp:1", "--c", "1,0,0"],
    ["dims", "sp:1", "lambda4"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_allow_n0(capsys):
    code, report = run_json(capsys, "build", "sp:0", "--allow-n0")
    assert code == EXIT_OK
    assert report["results"]["dim_M"] == 3


def test_lambda3_on_e8_is_refused():
    assert run(["dims", "e8", "lambda3"]) == EXIT_BUDGET


def test_small_budget_is_refused(monkeypatch):
    monkeypatch.setenv("SASAKI_BUDGET", "100")
    monkeypatch.setenv("SASAKI_CONFIG", os.environ["SASAKI_CONFIG"] + ".missing")
    assert run(["dims", "sp:1", "bilinear"]) == EXIT_BUDGET


def test_dims_uses_cache(capsys, isolated_config):
    code, first = run_json(capsys, "dims", "sp:1", "lambda3")
    assert code == EXIT_OK
    assert first["results"]["lambda3"]["dimension"] == 10
    assert len(os.listdir(isolated_config / "cache")) == 1
    _, second = run_json(capsys, "dims", "sp:1", "lambda3")
    assert second["results"] == first["results"]


def test_emit_basis(capsys, isolated_config):
    stem = isolated_config / "out" / "sp1"
    code, report = run_json(capsys, "dims", "sp:1", "lambda3", "--emit-basis", str(stem))
    assert code == EXIT_OK
    archive = np.load(report["results"]["files"]["archive"])
    assert archive["lambda3"].shape == (10, 7, 7, 7)
    assert archive["lambda3_packed"].shape == (10, 35)
    with open(report["results"]["files"]["sidecar"]) as f:
        assert json.load(f)["lambda3"]["dimension"] == 10


def test_classify_distinguished(capsys):
    code, report = run_json(capsys, "classify", "sp:1", "--a", "4", "--B", DISTINGUISHED_B)
    assert code == EXIT_OK
    flags = report["results"]["flags"]
    assert flags["parallelizes_reeb"] and flags["einstein"] and flags["phi_compatible"]
    assert report["inputs"]["a"] == 4.0
    assert report["results"]["summary"]["scalar"] == pytest.approx(0.0, abs=1e-8)


def test_classify_su3_with_c(capsys):
    code, report = run_json(capsys, "classify", "su:3", "--a", "1",
                            "--B", "0,0,0,1,0,0,0,-1,0", "--c", "1,0,0")
    assert code == EXIT_OK
    assert report["results"]["flags"]["einstein"]
    assert report["results"]["summary"]["scalar"] == pytest.approx(31.5, abs=1e-6)


def test_sweep(capsys):
    code, report = run_json(capsys, "sweep", "sp:1", "--seed", "5")
    assert code == EXIT_OK
    assert report["results"]["count"] == 4
    assert report["seed"] == 5
    assert run(["sweep", "sp:1", "--count", "0"]) == EXIT_OK


def test_timing(capsys):
    _, report = run_json(capsys, "build", "sp:1", "--timing")
    assert report["timing"] >= 0.0
    _, report = run_json(capsys, "build", "sp:1")
    assert report["timing"] is None


def test_parse_floats():
    assert parse_floats("1,2.5,-3", 3, "c") == [1.0, 2.5, -3.0]
    with pytest.raises(UsageError):
        parse_floats("1,2", 3, "c")
    with pytest.raises(UsageError):
        parse_floats(None, 3, "c")


def test_report_serialization():
    report = RunReport(space="sp:1", command="sweep", inputs={"count": np.int64(2)},
                       results={"count": 2, "seed": 1, "value": np.float64(np.nan)},
                       residuals={"scalar": np.float64(1e-12)}, passed=False, seed=1)
    data = json.loads(report.to_json())
    assert data["inputs"]["count"] == 2
    assert data["results"]["value"] is None
    assert data["pass"] is False
    assert report.exit_code == 1
    assert "❌ FAIL" in format_report(report)


def test_ledger_covers_one_command(capsys):
    remember_residual("metric", "sp:9", 1.0, False)
    assert run(["build", "sp:1"]) == EXIT_OK
    assert session_memory["residuals"] == []
    for _ in range(2):
        run(["classify", "sp:1", "--a", "4", "--B", DISTINGUISHED_B])
    assert len(session_memory["residuals"]) == len(FLAGS)
    assert len(session_memory["verdicts"]) == 1
