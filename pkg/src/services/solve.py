"""
Solve workflow: discretize, assemble, solve for the density and evaluate
the combined solution u = u1 + u2.
"""
import time
from typing import List, Optional

import humanize
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..dto.problem_models import ManufacturedDensity, RunConfig, RunModes, is_unit_square
from ..dto.result_models import SolutionSample, SolveResult, SolveSummary
from ..numerics.bem import (BoundaryDensity, SingleLayerMatrix, assemble_galerkin, assemble_rhs,
                            TraceData, eval_single_layer, manufactured_rhs, solve_density)
from ..numerics.errors import ConfigurationError
from ..numerics.geometry import PanelMesh, discretize, gauss_rule
from ..numerics.spectral import SineSeries, eval_series, solve_volume
from ..numerics.specfun import FracOrder
from .base import Workflow


class SolvedProblem(BaseModel):
    """Intermediate state shared by the solve and verify workflows"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    order: FracOrder
    mesh: PanelMesh
    matrix: SingleLayerMatrix
    rhs: TraceData
    density: BoundaryDensity
    volume: Optional[SineSeries] = None


class SolveService(Workflow):
    """Boundary solve plus evaluation of the combined solution"""

    mode = RunModes.SOLVE

    def prepare(self, run_config: RunConfig) -> SolvedProblem:
        """
        Build the mesh, assemble and solve for the density.

        Args:
            run_config: Validated run configuration

        Returns:
            SolvedProblem with mesh, matrix, load vector, density and the
            spectral part (if any)
        """
        problem = run_config.problem
        disc = run_config.discretization
        order = run_config.order()
        quad = gauss_rule(disc.quad_order)
        started = time.monotonic()

        mesh = discretize(problem.curve(), disc.n_panels)
        self.logger.info(
            f"Mesh: {mesh.size} panels on {problem.geometry.kind}, "
            f"h in [{mesh.lengths.min():.4g}, {mesh.lengths.max():.4g}]"
        )
        matrix = assemble_galerkin(mesh, order, quad, chunk_size=self.chunk_size)

        data = problem.boundary_data
        if isinstance(data, ManufacturedDensity):
            rhs = manufactured_rhs(data.density_function(mesh.center()), mesh, order, quad,
                                   refinement=disc.reference_refinement, chunk_size=self.chunk_size)
        else:
            rhs = assemble_rhs(data.function(), mesh, quad)
        density = solve_density(matrix, rhs)

        volume = None
        if not problem.volume_data.is_zero:
            volume = solve_volume(problem.volume_data.function(), order, disc.spectral_order, disc.spectral_density)

        self.logger.info(
            f"Boundary solve finished in {humanize.naturaldelta(time.monotonic() - started, minimum_unit='milliseconds')}"
        )
        return SolvedProblem(order=order, mesh=mesh, matrix=matrix, rhs=rhs, density=density, volume=volume)

    def evaluation_points(self, run_config: RunConfig, mesh: PanelMesh) -> np.ndarray:
        evaluation = run_config.evaluation
        parts = [np.asarray(evaluation.points, dtype=float).reshape(-1, 2)]
        if evaluation.grid is not None:
            low, high = mesh.starts.min(axis=0), mesh.starts.max(axis=0)
            parts.append(evaluation.grid.points((low[0], high[0], low[1], high[1])))
        return np.concatenate(parts)

    def evaluate(self, solved: SolvedProblem, points: np.ndarray) -> List[SolutionSample]:
        """u1 (zero outside the square) and u2 at the evaluation points"""
        if len(points) == 0:
            return []
        u2 = eval_single_layer(solved.density, solved.order, points)
        u1 = np.zeros(len(points))
        if solved.volume is not None:
            inside = np.all((points >= 0.0) & (points <= 1.0), axis=1)
            if np.any(inside):
                u1[inside] = eval_series(solved.volume, points[inside])
        return [SolutionSample(x=float(p[0]), y=float(p[1]), u1=float(a), u2=float(b))
                for p, a, b in zip(points, u1, u2)]

    def summarize(self, solved: SolvedProblem) -> SolveSummary:
        eig = solved.matrix.eigenvalues()
        condition = solved.matrix.condition_estimate()
        return SolveSummary(
            n_panels=solved.mesh.size,
            alpha=solved.order.alpha,
            density_l1=solved.density.l1_norm(),
            total_mass=solved.density.total_mass(),
            condition_estimate=condition if np.isfinite(condition) else None,
            min_eigenvalue=float(eig[0]),
            max_eigenvalue=float(eig[-1]),
            spd=bool(eig[0] > 0 and solved.matrix.cholesky_ok),
            solver_residual=solved.density.relative_residual,
            symmetry_defect=solved.matrix.symmetry_defect,
            factorization=solved.density.factorization,
        )

    def result(self, run_config: RunConfig, solved: SolvedProblem) -> SolveResult:
        mesh = solved.mesh
        rows = [(i, float(m[0]), float(m[1]), float(g))
                for i, (m, g) in enumerate(zip(mesh.midpoints, solved.density.coeffs))]
        samples = self.evaluate(solved, self.evaluation_points(run_config, mesh))
        return SolveResult(summary=self.summarize(solved), density_rows=rows, solution=samples)

    def run(self, run_config: RunConfig) -> SolveResult:
        if not run_config.problem.volume_data.is_zero and not is_unit_square(run_config.problem.geometry):
            raise ConfigurationError("nonzero volume data requires the unit square geometry")
        return self.result(run_config, self.prepare(run_config))

    def summary_rows(self, result: SolveResult) -> list:
        s = result.summary
        condition = f"{s.condition_estimate:.4g}" if s.condition_estimate is not None else "inf"
        return [
            ("panels", str(s.n_panels)),
            ("alpha", f"{s.alpha:g}"),
            ("||G||_L1", f"{s.density_l1:.6g}"),
            ("condition estimate", condition),
            ("min eigenvalue", f"{s.min_eigenvalue:.4g}"),
            ("SPD", "yes" if s.spd else "no"),
            ("factorization", s.factorization),
            ("solver residual", f"{s.solver_residual:.2e}"),
            ("symmetry defect", f"{s.symmetry_defect:.2e}"),
            ("evaluation points", str(len(result.solution))),
        ]
