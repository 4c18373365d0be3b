"""
Converge workflow: manufactured-density error study over a sequence of meshes.
"""
from ..dto.problem_models import RunConfig, RunModes
from ..dto.result_models import ConvergeResult, ConvergenceRow
from ..numerics.bem import assemble_galerkin, density_error, manufactured_rhs, solve_density
from ..numerics.geometry import discretize, gauss_rule
from .base import Workflow


class ConvergenceService(Workflow):
    """Relative L2 density error and normalized spectrum per panel count"""

    mode = RunModes.CONVERGE

    def run(self, run_config: RunConfig) -> ConvergeResult:
        problem = run_config.problem
        disc = run_config.discretization
        order = run_config.order()
        quad = gauss_rule(disc.quad_order)
        curve = problem.curve()

        rows = []
        previous = None
        for n_panels in run_config.convergence.panel_counts:
            mesh = discretize(curve, n_panels)
            density_fn = problem.boundary_data.density_function(mesh.center())
            matrix = assemble_galerkin(mesh, order, quad, chunk_size=self.chunk_size)
            rhs = manufactured_rhs(density_fn, mesh, order, quad, refinement=disc.reference_refinement,
                                   chunk_size=self.chunk_size)
            density = solve_density(matrix, rhs)
            error = density_error(density, density_fn)
            eig = matrix.normalized_eigenvalues()
            ratio = previous / error if previous is not None and error > 0 else None
            rows.append(ConvergenceRow(n_panels=n_panels, error=error, ratio=ratio,
                                       min_eigenvalue=float(eig[0]), max_eigenvalue=float(eig[-1])))
            self.logger.info(
                f"N={n_panels}: error {error:.4e}" + (f", ratio {ratio:.3f}" if ratio is not None else "")
            )
            previous = error
        return ConvergeResult(rows=rows)

    def summary_rows(self, result: ConvergeResult) -> list:
        return [(f"N={row.n_panels}",
                 f"error {row.error:.3e}" + (f"  ratio {row.ratio:.2f}" if row.ratio is not None else ""))
                for row in result.rows]
