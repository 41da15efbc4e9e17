import json

import pandas as pd
import pytest

from evodg.exceptions import ConfigError, NumericalError
from evodg.runner import EXIT_CONFIG, EXIT_NUMERICAL, Runner
from main import main
from utils.config import RunConfig, build_config


def test_quadrature_prints_nodes_and_weights(capsys):
    assert main(["quadrature", "--q", "2", "--a", "1.0"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    nodes, weights = zip(*(map(float, line.split(",")) for line in lines))
    assert nodes[-1] == 1.0
    assert all(w > 0.0 for w in weights)


def test_misspelled_command_is_resolved(capsys):
    assert main(["quadratur", "--q", "0"]) == 0
    assert capsys.readouterr().out.strip() == "1,2"


def test_unknown_command(capsys):
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert "Unknown command" in capsys.readouterr().err


def test_invalid_cell_count_is_a_config_error(capsys, tmp_path):
    code = main(["solve", "--problem", "prob1", "--N", "7", "--out", str(tmp_path / "s.csv")])
    assert code == EXIT_CONFIG
    assert "N=7" in capsys.readouterr().err


def test_solve_writes_samples(capsys, tmp_path):
    out = tmp_path / "solution.csv"
    assert main(["solve", "--problem", "smooth", "--N", "4", "--p", "2", "--q", "1", "--out", str(out)]) == 0
    assert capsys.readouterr().out.startswith("E_sup=")
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "x", "u_h", "v_h"]
    assert len(frame) == 25


def test_convergence_table_is_deterministic(capsys):
    argv = ["convergence", "--problem", "smooth", "--p", "1", "--q", "1", "--sweep", "4,8"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    lines = first.splitlines()
    assert lines[0] == "N,E_sup,rate,E_Qrho,rate,E_rho,rate"
    assert [line.split(",")[0] for line in lines[1:]] == ["4", "8"]


def test_config_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("EVODG_P", "3")
    monkeypatch.setenv("EVODG_RHO", "0.5")
    assert build_config({}).p == 3
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"p": 4, "rate-matrix": True, "sweep": [8, 16]}), encoding="utf-8")
    config = build_config({}, str(path))
    assert (config.p, config.rho, config.rate_matrix, config.sweep) == (4, 0.5, True, [8, 16])
    assert build_config({"p": 5, "q": None}, str(path)).p == 5
    assert build_config({"sweep": "12,24"}).sweep == [12, 24]


def test_config_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"colour": "red"}), encoding="utf-8")
    with pytest.raises(ConfigError, match="Unknown key"):
        build_config({}, str(path))
    with pytest.raises(ConfigError):
        build_config({}, str(tmp_path / "missing.json"))
    with pytest.raises(ConfigError):
        build_config({"p": 1.5})
    with pytest.raises(ConfigError):
        build_config({"p": 0}).validate()
    with pytest.raises(ConfigError):
        RunConfig(q=0).validate()
    RunConfig(q=0).validate(min_q=0)


def test_runner_maps_numerical_failures():
    def fail(config):
        raise NumericalError("Slab system is singular", m=2)

    runner = Runner()
    runner.commands = {"solve": {"func": fail}}
    result = runner.run("solve", RunConfig())
    assert result["exit_code"] == EXIT_NUMERICAL
    assert "m=2" in result["error"]


@pytest.mark.slow
def test_verify_reports_pass(capsys, tmp_path):
    out = tmp_path / "verify.json"
    assert main(["verify", "--trials", "50", "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "PASS"
    assert json.loads(out.read_text(encoding="utf-8"))["passed"] is True


def test_convergence_in_time_at_fixed_cells(capsys):
    argv = ["convergence", "--problem", "smooth", "--p", "2", "--q", "1", "--N", "8", "--sweep", "4,2"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "M,E_sup,rate,E_Qrho,rate,E_rho,rate"
    assert [line.split(",")[0] for line in lines[1:]] == ["2", "4"]
