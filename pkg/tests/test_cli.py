"""Command-line interface: outputs and exit codes."""

from __future__ import annotations

import json

import pytest

from decision_workbench.cli import main
from decision_workbench.codec import encode

from conftest import prognosis, simple_treatment


@pytest.fixture
def simple_file(tmp_path):
    path = tmp_path / "simple.json"
    path.write_text(encode(simple_treatment()), encoding="utf-8")
    return str(path)


@pytest.fixture
def prognosis_file(tmp_path):
    path = tmp_path / "prognosis.json"
    path.write_text(encode(prognosis()), encoding="utf-8")
    return str(path)


def test_validate_ok(simple_file, capsys):
    assert main(["validate", simple_file]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_reports_violations(tmp_path, capsys):
    document = json.loads(encode(simple_treatment()))
    del document["nodes"][1]["cpt"]["wait"]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    assert main(["validate", str(path)]) == 1
    out = capsys.readouterr().out
    assert "MISSING_ROW" in out


def test_validate_missing_file(capsys):
    assert main(["validate", "/no/such/file.json"]) == 1
    assert "PARSE_ERROR" in capsys.readouterr().err


def test_solve_text_output(simple_file, capsys):
    assert main(["solve", simple_file]) == 0
    out = capsys.readouterr().out
    assert "expected utility: 60.000000" in out
    assert "treat" in out


def test_solve_machine_output(simple_file, capsys):
    assert main(["solve", simple_file, "--output", "machine"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["expected_utility"] == pytest.approx(60.0)
    assert payload["policy"] == {"T": {"": "treat"}}


def test_oracle_agrees(simple_file, capsys):
    assert main(["oracle", simple_file, "--output", "machine"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["expected_utility"] == pytest.approx(60.0)


def test_sweep_outputs_grid(prognosis_file, capsys):
    rc = main(
        ["sweep", prognosis_file, "--param", "S//good", "--from", "0", "--to", "1", "--steps", "3"]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert [p["value"] for p in payload["points"]] == [0.0, 0.5, 1.0]
    assert [p["optimal_eu"] for p in payload["points"]] == [
        pytest.approx(40.0),
        pytest.approx(50.0),
        pytest.approx(100.0),
    ]


def test_thresholds_finds_crossing(prognosis_file, capsys):
    assert main(["thresholds", prognosis_file, "--param", "S//good"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["thresholds"][0] == pytest.approx(0.4, abs=1e-6)


def test_evpi_output(prognosis_file, capsys):
    assert main(["evpi", prognosis_file, "--chance", "S", "--decision", "T"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["evpi"] == pytest.approx(20.0)


def test_domain_errors_exit_one(simple_file, capsys):
    assert main(["evpi", simple_file, "--chance", "O", "--decision", "T"]) == 1
    assert "WOULD_CYCLE" in capsys.readouterr().err


def test_unknown_param_exits_one(prognosis_file, capsys):
    assert main(["sweep", prognosis_file, "--param", "S//great",
                 "--from", "0", "--to", "1", "--steps", "2"]) == 1
    assert "PARAM_NOT_FOUND" in capsys.readouterr().err


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as err:
        main(["sweep", "file.json"])  # missing required --param/--from/--to
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["not-a-command"])
    assert err.value.code == 2
