"""Command-line runs: exit codes, error lines and result files"""
import json

import pytest
from click.testing import CliRunner

from src.cli import EXIT_CONFIGURATION, EXIT_NUMERICAL, error_kind, main
from src.dto.problem_models import RunConfig
from src.numerics.errors import (AssemblyError, ConfigurationError, DomainError, EvaluationError,
                                 FracBemError, OracleError, SolverError)
from src.utils.config import config

SYMBOL_RUN = {
    "mode": "symbol-check",
    "problem": {"dimension": 2, "alpha": 0.6},
    "symbol_check": {"cutoff_radius": 1.0, "r_values": [1.0, 10.0]},
    "output": {"directory": "out"},
}

CIRCLE_SOLVE = {
    "mode": "solve",
    "problem": {"dimension": 2, "alpha": 0.6, "geometry": {"kind": "circle"}},
    "discretization": {"n_panels": 16},
    "evaluation": {"points": [[0.0, 0.0], [0.3, -0.2], [2.0, 1.0]]},
    "output": {"directory": "out"},
}


@pytest.fixture
def workspace(tmp_path, monkeypatch, isolated_logging):
    """Run from an empty directory so only the built-in settings apply"""
    monkeypatch.chdir(tmp_path)
    config.reload()
    yield tmp_path
    config.reload()


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_symbol_check_run(workspace, write_run_config):
    path = write_run_config(SYMBOL_RUN)
    result = invoke("--config", str(path))
    assert result.exit_code == 0, result.output
    lines = (workspace / "out" / "symbol.csv").read_text(encoding='utf-8').splitlines()
    assert lines[0] == f"# config_hash: {RunConfig.model_validate(SYMBOL_RUN).config_hash()}"
    assert lines[1] == "r,symbol,bound_ratio"
    assert len(lines) == 4
    assert "fracbem symbol-check" in result.output


def test_summary_names_the_log_file(workspace, write_run_config):
    (workspace / "config").mkdir()
    (workspace / "config" / "development.yml").write_text(
        "logging:\n"
        "  file_enabled: true\n"
        "  file_path: logs/run.log\n"
        "  console_enabled: false\n",
        encoding='utf-8',
    )
    config.reload()
    result = invoke("--config", str(write_run_config(SYMBOL_RUN)))
    assert result.exit_code == 0, result.output
    assert (workspace / "logs" / "run.log").exists()
    assert "log file" in result.output
    assert "logs/run.log" in result.output


def test_out_overrides_output_directory(workspace, write_run_config):
    path = write_run_config(SYMBOL_RUN)
    result = invoke("--config", str(path), "--out", "elsewhere")
    assert result.exit_code == 0, result.output
    assert (workspace / "elsewhere" / "symbol.csv").exists()
    assert not (workspace / "out").exists()


def test_mode_override(workspace, write_run_config):
    path = write_run_config({**CIRCLE_SOLVE, "symbol_check": {"r_values": [2.0]}})
    result = invoke("--config", str(path), "--mode", "symbol-check")
    assert result.exit_code == 0, result.output
    assert (workspace / "out" / "symbol.csv").exists()
    assert not (workspace / "out" / "density.csv").exists()


def test_solve_run_is_deterministic(workspace, write_run_config):
    path = write_run_config(CIRCLE_SOLVE)
    for out in ("first", "second"):
        result = invoke("--config", str(path), "--out", out)
        assert result.exit_code == 0, result.output
    for name in ("density.csv", "solution.csv", "summary.json"):
        first = (workspace / "first" / name).read_bytes()
        assert first == (workspace / "second" / name).read_bytes()
    density = (workspace / "first" / "density.csv").read_text(encoding='utf-8').splitlines()
    assert density[1] == "panel,mid_x,mid_y,G"
    assert len(density) == 2 + 16


def run_twice(workspace, path):
    for out in ("first", "second"):
        result = invoke("--config", str(path), "--out", out)
        assert result.exit_code == 0, result.output
    return workspace / "first", workspace / "second"


def test_verify_run_is_deterministic(workspace, write_run_config):
    payload = {
        **CIRCLE_SOLVE,
        "mode": "verify",
        "problem": {"dimension": 2, "alpha": 0.75, "geometry": {"kind": "circle"}},
        "verification": {
            "points": [[0.0, 0.0]],
            "refinements": 0,
            "window": {"n_angular": 16},
            "far_field_radii": [10.0, 100.0],
            "far_field_directions": 4,
        },
    }
    first, second = run_twice(workspace, write_run_config(payload))
    for name in ("residuals.json", "far_field.csv", "density.csv", "solution.csv", "summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    config_hash = RunConfig.model_validate(payload).config_hash()
    far_field = (first / "far_field.csv").read_text(encoding='utf-8').splitlines()
    assert far_field[0] == f"# config_hash: {config_hash}"
    assert far_field[1] == "radius,dir_x,dir_y,value,scaled"
    assert len(far_field) == 2 + 2 * 4

    residuals = json.loads((first / "residuals.json").read_text(encoding='utf-8'))
    assert residuals["config_hash"] == config_hash
    assert [entry["point"] for entry in residuals["residuals"]] == [[0.0, 0.0]]
    assert residuals["residuals"][0]["level"] == 0
    assert "uncertainty" in residuals["residuals"][0]


def test_converge_run_is_deterministic(workspace, write_run_config):
    payload = {
        "mode": "converge",
        "problem": {"dimension": 2, "alpha": 0.7, "geometry": {"kind": "circle"},
                    "boundary_data": {"kind": "manufactured"}},
        "discretization": {"reference_refinement": 2},
        "convergence": {"panel_counts": [16, 8]},
        "output": {"directory": "out"},
    }
    first, second = run_twice(workspace, write_run_config(payload))
    assert (first / "convergence.csv").read_bytes() == (second / "convergence.csv").read_bytes()

    lines = (first / "convergence.csv").read_text(encoding='utf-8').splitlines()
    assert lines[0] == f"# config_hash: {RunConfig.model_validate(payload).config_hash()}"
    assert lines[1] == "N,error,ratio,min_eigenvalue,max_eigenvalue"
    assert [line.split(",")[0] for line in lines[2:]] == ["8", "16"]
    assert not (first / "density.csv").exists()


def test_order_out_of_range(workspace, write_run_config):
    path = write_run_config({**SYMBOL_RUN, "mode": "solve", "problem": {"dimension": 2, "alpha": 0.9}})
    result = invoke("--config", str(path))
    assert result.exit_code == EXIT_CONFIGURATION
    assert "error: configuration: alpha out of admissible range" in result.output
    assert not (workspace / "out").exists()


def test_missing_configuration_file(workspace):
    result = invoke("--config", str(workspace / "absent.json"))
    assert result.exit_code == EXIT_CONFIGURATION
    assert "error: configuration: cannot read configuration" in result.output


def test_unknown_key(workspace, write_run_config):
    path = write_run_config({**SYMBOL_RUN, "bogus": True})
    result = invoke("--config", str(path))
    assert result.exit_code == EXIT_CONFIGURATION
    assert "error: configuration: bogus" in result.output


def test_malformed_json(workspace):
    path = workspace / "broken.json"
    path.write_text("{\"mode\": ", encoding='utf-8')
    result = invoke("--config", str(path))
    assert result.exit_code == EXIT_CONFIGURATION
    assert "error: configuration:" in result.output


def test_verification_point_too_close_to_the_boundary(workspace, write_run_config):
    path = write_run_config({
        **CIRCLE_SOLVE,
        "mode": "verify",
        "problem": {"dimension": 2, "alpha": 0.75, "geometry": {"kind": "circle"}},
        "verification": {"points": [[0.999, 0.0]], "refinements": 0},
    })
    result = invoke("--config", str(path))
    assert result.exit_code == EXIT_NUMERICAL
    assert "error: domain:" in result.output


@pytest.mark.parametrize("mode, section", [("solve", "evaluation"), ("verify", "verification")])
def test_point_on_the_curve_is_a_configuration_error(workspace, write_run_config, mode, section):
    path = write_run_config({
        **CIRCLE_SOLVE,
        "mode": mode,
        section: {"points": [[0.0, 0.0], [1.0, 0.0]]},
    })
    result = invoke("--config", str(path))
    assert result.exit_code == EXIT_CONFIGURATION
    assert "error: configuration:" in result.output
    assert "on the boundary" in result.output
    assert not (workspace / "out").exists()


def test_unknown_mode_is_a_usage_error(workspace, write_run_config):
    path = write_run_config(SYMBOL_RUN)
    result = invoke("--config", str(path), "--mode", "plot")
    assert result.exit_code == 2


@pytest.mark.parametrize("error, kind", [
    (ConfigurationError("x"), "configuration"),
    (AssemblyError("x"), "assembly"),
    (SolverError("x"), "solver"),
    (EvaluationError("x"), "evaluation"),
    (DomainError("x"), "domain"),
    (OracleError("x"), "oracle"),
    (FracBemError("x"), "frac_bem"),
])
def test_error_kind(error, kind):
    assert error_kind(error) == kind
