"""Tests for sesop_mg.bench.cli."""

from __future__ import annotations

import logging

import pytest
import yaml

from sesop_mg.bench import cli
from sesop_mg.bench.report import RunReport
from sesop_mg.config import LoggingSpec


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    monkeypatch.setattr(cli, "load_dotenv", lambda: False)
    monkeypatch.delenv(cli.OUT_ENV, raising=False)


@pytest.fixture
def config_file(tmp_path):
    def write(data: dict):
        path = tmp_path / "experiment.yaml"
        path.write_text(yaml.safe_dump(data))
        return str(path)

    return write


SMALL = {"name": "small", "grid": {"fine_n": 15, "coarsest_n": 7}, "analysis_n": 16}


def test_solve_ok(config_file, capsys):
    assert cli.main(["solve", config_file(SMALL)]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "label=small" in out
    assert out.strip().endswith("OK: solve: 1 report(s)")


def test_solve_writes_plot_data(config_file, tmp_path):
    out_dir = tmp_path / "results"
    assert cli.main(["solve", config_file(SMALL), "--out", str(out_dir), "--seed", "4"]) == cli.EXIT_OK
    assert (out_dir / "small.json").exists()
    assert (out_dir / "small.csv").exists()


def test_out_from_environment(config_file, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["solve", config_file(SMALL)]) == cli.EXIT_OK
    assert (tmp_path / "env" / "small.json").exists()


def test_invalid_config(config_file, capsys):
    code = cli.main(["solve", config_file({"grid": {"fine_n": "big"}, "oops": 1})])
    assert code == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "FAIL: Experiment configuration errors:" in err
    assert "oops: unknown key" in err


def test_missing_config(tmp_path, capsys):
    assert cli.main(["solve", str(tmp_path / "missing.yaml")]) == cli.EXIT_CONFIG
    assert "file not found" in capsys.readouterr().err


@pytest.mark.parametrize("strict", [False, True])
def test_unconverged_exit_code(config_file, capsys, strict):
    argv = ["solve", config_file({**SMALL, "stop": {"max_iter": 1}})]
    if strict:
        argv.append("--strict")
    assert cli.main(argv) == cli.EXIT_UNCONVERGED
    assert "FAIL:" in capsys.readouterr().err


def test_analyze(config_file, capsys):
    assert cli.main(["analyze", config_file(SMALL)]) == cli.EXIT_OK
    assert "label=small-analysis" in capsys.readouterr().out


def test_list(capsys):
    assert cli.main(["list"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("table1: ") for line in lines)
    assert len(lines) == 10


def test_suite_subcommand_passes_options(mocker, tmp_path):
    run_suite = mocker.patch.object(cli, "run_suite", return_value=[RunReport("r", {})])
    code = cli.main(["table1", "--scale", "0.25", "--workers", "2", "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    suite = run_suite.call_args.args[0]
    assert run_suite.call_args.kwargs == {"workers": 2}
    assert suite.name == "table1"
    assert all(e.config.grid.fine_n == 15 for e in suite.entries)


def test_run_preset_by_name(mocker):
    run_suite = mocker.patch.object(cli, "run_suite", return_value=[RunReport("r", {})])
    assert cli.main(["run", "fig3", "--seed", "2"]) == cli.EXIT_OK
    suite = run_suite.call_args.args[0]
    assert suite.kind == "rratio"
    assert all(e.config.seed == 2 for e in suite.entries)


def test_run_unknown_preset(capsys):
    assert cli.main(["run", "nope"]) == cli.EXIT_CONFIG
    assert "no such preset" in capsys.readouterr().err


def test_solver_failure_exit_code(config_file, mocker, capsys):
    mocker.patch.object(cli, "run_experiment", side_effect=ValueError("boom"))
    assert cli.main(["solve", config_file(SMALL)]) == cli.EXIT_FAILED
    assert "FAIL: ValueError: boom" in capsys.readouterr().err


def test_configure_logging_module_levels():
    cli.configure_logging(LoggingSpec(level="WARNING", modules={"sesop_mg.baselines": "DEBUG"}), None)
    assert logging.getLogger().level == logging.WARNING
    assert logging.getLogger("sesop_mg.baselines").level == logging.DEBUG
    cli.configure_logging(LoggingSpec(), "error")
    assert logging.getLogger().level == logging.ERROR
    logging.getLogger("sesop_mg.baselines").setLevel(logging.NOTSET)
