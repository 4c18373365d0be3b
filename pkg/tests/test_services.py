"""Run configuration models, workflows and result files"""
import json

import numpy as np
import pytest
from pydantic import ValidationError

from src.dto.problem_models import (ConstantData, DiscretizationSpec, GridSpec, ProblemSpec, RunConfig, SineModes,
                                    is_unit_square)
from src.dto.result_models import SolveResult
from src.numerics.errors import ConfigurationError
from src.numerics.geometry import Circle, Polygon
from src.services import (ConvergenceService, ResultsWriter, SolveService, SymbolCheckService,
                          VerificationService)
from src.services.results_writer import format_value


def circle_run(**overrides) -> RunConfig:
    payload = {
        "mode": "solve",
        "problem": {"dimension": 2, "alpha": 0.6, "geometry": {"kind": "circle", "radius": 1.0}},
        "discretization": {"n_panels": 16},
    }
    payload.update(overrides)
    return RunConfig.model_validate(payload)


def square_run(**overrides) -> RunConfig:
    payload = {
        "mode": "solve",
        "problem": {
            "dimension": 2,
            "alpha": 0.6,
            "geometry": {"kind": "unit_square"},
            "volume_data": {"kind": "sine_modes", "modes": [[1, 1, 1.0]]},
        },
        "discretization": {"n_panels": 16, "spectral_order": 4},
    }
    payload.update(overrides)
    return RunConfig.model_validate(payload)


def test_problem_defaults():
    problem = ProblemSpec(alpha=0.7)
    assert problem.dimension == 2
    assert problem.geometry.kind == "unit_square"
    assert problem.boundary_data.kind == "constant"
    assert problem.volume_data.is_zero
    assert problem.order().alpha == 0.7


def test_discretization_defaults():
    disc = DiscretizationSpec()
    assert (disc.n_panels, disc.quad_order, disc.spectral_order, disc.spectral_density) == (64, 8, 32, 4)


def test_problem_rejects_bad_dimension():
    with pytest.raises(ValidationError):
        ProblemSpec(dimension=4, alpha=0.7)


def test_volume_data_needs_unit_square():
    with pytest.raises(ValidationError, match="unit square"):
        ProblemSpec(alpha=0.7, geometry={"kind": "circle"},
                    volume_data={"kind": "sine_modes", "modes": [[1, 1, 1.0]]})


def test_zero_amplitude_modes_allowed_anywhere():
    problem = ProblemSpec(alpha=0.7, geometry={"kind": "circle"},
                          volume_data={"kind": "sine_modes", "modes": [[2, 1, 0.0]]})
    assert problem.volume_data.is_zero


def test_sine_mode_indices_start_at_one():
    with pytest.raises(ValidationError):
        ProblemSpec(alpha=0.7, volume_data={"kind": "sine_modes", "modes": [[0, 1, 1.0]]})


def test_unit_square_detection():
    assert is_unit_square(ProblemSpec(alpha=0.7).geometry)
    assert is_unit_square(Polygon(vertices=[(1.0, 1.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]))
    assert not is_unit_square(Polygon(vertices=[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]))
    assert not is_unit_square(Circle())


def test_grid_points_are_cell_centered():
    points = GridSpec(nx=2, ny=1, bounds=(0.0, 1.0, 0.0, 1.0)).points((9.0, 9.0, 9.0, 9.0))
    np.testing.assert_allclose(points, [[0.25, 0.5], [0.75, 0.5]])


def test_grid_uses_default_bounds():
    points = GridSpec(nx=1, ny=1).points((-1.0, 1.0, -2.0, 2.0))
    np.testing.assert_allclose(points, [[0.0, 0.0]])


def test_run_config_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"problem": {"alpha": 0.6}, "bogus": 1})


@pytest.mark.parametrize("alpha", [0.5, 0.76, 0.9])
def test_boundary_modes_need_solvable_order(alpha):
    with pytest.raises(ValidationError, match="alpha out of admissible range"):
        RunConfig.model_validate({"problem": {"alpha": alpha}})


def test_boundary_modes_need_the_plane():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"mode": "solve", "problem": {"dimension": 3, "alpha": 0.7}})


def test_symbol_check_accepts_wider_orders():
    run_config = RunConfig.model_validate({"mode": "symbol-check", "problem": {"dimension": 3, "alpha": 0.3}})
    order = run_config.symbol_order()
    assert (order.d, order.alpha) == (3, 0.3)


def test_converge_needs_manufactured_data():
    with pytest.raises(ValidationError, match="manufactured"):
        circle_run(mode="converge")


def test_evaluation_points_must_be_off_the_curve():
    with pytest.raises(ValidationError, match="evaluation.points on the boundary"):
        circle_run(evaluation={"points": [[0.0, 0.0], [0.0, -1.0]]})
    with pytest.raises(ValidationError, match="verification.points on the boundary"):
        circle_run(mode="verify", verification={"points": [[1.0, 0.0]]})
    # symbol checks never evaluate the potential
    assert circle_run(mode="symbol-check", evaluation={"points": [[1.0, 0.0]]}).mode == "symbol-check"
    assert circle_run(verification={"points": [[1.0, 0.0]]}).mode == "solve"


def test_with_mode():
    run_config = circle_run()
    assert run_config.with_mode(None) is run_config
    switched = run_config.with_mode("symbol-check")
    assert switched.mode == "symbol-check"
    assert switched.problem.model_dump() == run_config.problem.model_dump()
    with pytest.raises(ValidationError):
        run_config.with_mode("converge")


def test_config_hash_ignores_output_directory():
    a = circle_run(output={"directory": "first"})
    b = circle_run(output={"directory": "second"})
    c = circle_run(problem={"dimension": 2, "alpha": 0.61, "geometry": {"kind": "circle"}})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 64


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(2.0) == "2"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(7) == "7"


def test_writer_csv_header(tmp_path):
    writer = ResultsWriter(tmp_path / "out", "abc123")
    writer.write_csv("table.csv", ["a", "b"], [(1, 0.5), (2, None)])
    lines = (tmp_path / "out" / "table.csv").read_text(encoding='utf-8').splitlines()
    assert lines == ["# config_hash: abc123", "a,b", "1,0.5", "2,"]
    assert writer.written == [tmp_path / "out" / "table.csv"]


def test_writer_json_replaces_non_finite(tmp_path):
    writer = ResultsWriter(tmp_path, "abc123")
    writer.write_json("summary.json", {"condition": float("inf"), "values": [1.0, float("nan")]})
    document = json.loads((tmp_path / "summary.json").read_text(encoding='utf-8'))
    assert document == {"config_hash": "abc123", "condition": None, "values": [1.0, None]}


def test_writer_json_floats_use_seventeen_digits(tmp_path):
    writer = ResultsWriter(tmp_path, "abc123")
    writer.write_json("summary.json", {"b": 0.1, "a": {"n": 3, "ok": True, "x": [1000.0, 2.0 ** -70]}, "c": []})
    text = (tmp_path / "summary.json").read_text(encoding='utf-8')
    assert text == (
        '{\n'
        '  "a": {\n'
        '    "n": 3,\n'
        '    "ok": true,\n'
        '    "x": [\n'
        '      1000,\n'
        '      8.4703294725430034e-22\n'
        '    ]\n'
        '  },\n'
        '  "b": 0.10000000000000001,\n'
        '  "c": [],\n'
        '  "config_hash": "abc123"\n'
        '}\n'
    )
    assert json.loads(text)["b"] == 0.1


def test_writer_respects_formats(tmp_path):
    writer = ResultsWriter(tmp_path, "abc123", formats=["json"])
    writer.write_csv("table.csv", ["a"], [(1,)])
    assert not (tmp_path / "table.csv").exists()
    assert writer.written == []


def test_solve_service_on_circle():
    run_config = circle_run(evaluation={"points": [[0.0, 0.0], [2.0, 0.0]]})
    result = SolveService().run(run_config)
    assert isinstance(result, SolveResult)
    assert len(result.density_rows) == 16
    assert result.summary.spd
    assert result.summary.factorization == "cholesky"
    assert result.summary.symmetry_defect <= 1e-10
    assert [s.u1 for s in result.solution] == [0.0, 0.0]
    # Positive density: the potential decays away from the circle
    assert result.solution[0].u2 > result.solution[1].u2 > 0.0


def test_solve_service_adds_spectral_part():
    run_config = square_run(evaluation={"points": [[0.5, 0.5], [1.5, 0.5]]})
    result = SolveService().run(run_config)
    inside, outside = result.solution
    expected = -(2.0 * np.pi ** 2) ** -0.6
    assert inside.u1 == pytest.approx(expected, rel=1e-10)
    assert outside.u1 == 0.0
    assert inside.u == pytest.approx(inside.u1 + inside.u2)


def test_solve_service_grid_points():
    run_config = circle_run(evaluation={"grid": {"nx": 3, "ny": 2}})
    result = SolveService().run(run_config)
    assert len(result.solution) == 6


def test_solve_service_summary_rows():
    service = SolveService()
    result = service.run(circle_run())
    labels = [label for label, _ in service.summary_rows(result)]
    assert "condition estimate" in labels
    assert "SPD" in labels


def test_convergence_service():
    run_config = circle_run(
        mode="converge",
        problem={"dimension": 2, "alpha": 0.7, "geometry": {"kind": "circle"},
                 "boundary_data": {"kind": "manufactured", "mean": 1.0, "amplitude": 0.5}},
        convergence={"panel_counts": [32, 16]},
    )
    result = ConvergenceService().run(run_config)
    assert [row.n_panels for row in result.rows] == [16, 32]
    assert result.rows[0].ratio is None
    assert result.rows[1].error < result.rows[0].error
    assert result.rows[1].ratio == pytest.approx(result.rows[0].error / result.rows[1].error)
    assert all(row.min_eigenvalue > 0 for row in result.rows)


def test_symbol_check_service():
    run_config = RunConfig.model_validate({
        "mode": "symbol-check",
        "problem": {"dimension": 3, "alpha": 0.3},
        "symbol_check": {"cutoff_radius": 1.0, "r_values": [1.0, 10.0]},
    })
    service = SymbolCheckService()
    result = service.run(run_config)
    assert [s.r for s in result.samples] == [1.0, 10.0]
    assert len(service.summary_rows(result)) == 2


def test_verification_service():
    run_config = circle_run(
        mode="verify",
        problem={"dimension": 2, "alpha": 0.75, "geometry": {"kind": "circle"}},
        verification={"points": [[0.0, 0.0]], "refinements": 1,
                      "window": {"n_radial": 8, "n_angular": 16}, "far_field_directions": 4},
    )
    service = VerificationService()
    result = service.run(run_config)
    assert [e.level for e in result.residuals] == [0, 1]
    assert result.residuals[1].report.window.r_inner == pytest.approx(0.5 * result.residuals[0].report.window.r_inner)
    assert result.far_field.ok
    assert len(result.far_field.rows) == 16
    labels = [label for label, _ in service.summary_rows(result)]
    assert "within bounds (finest)" in labels


def test_spectral_volume_needs_unit_square():
    problem = ProblemSpec.model_construct(dimension=2, alpha=0.6, geometry=Circle(), boundary_data=ConstantData(),
                                          volume_data=SineModes(modes=[(1, 1, 1.0)]))
    run_config = circle_run().model_copy(update={"problem": problem})
    with pytest.raises(ConfigurationError):
        SolveService().run(run_config)
