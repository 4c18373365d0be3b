"""
Verify workflow: solve, then check pointwise annihilation of the fractional
Laplacian off the boundary and far-field decay of the potential.
"""
from typing import List

import numpy as np

from ..dto.problem_models import RunConfig, RunModes
from ..dto.result_models import ResidualEntry, VerifyResult
from ..numerics.oracle import FarFieldTable, bem_residual, far_field_decay
from .base import Workflow
from .solve import SolvedProblem, SolveService


class VerificationService(Workflow):
    """Oracle residuals at verification points over successively refined windows"""

    mode = RunModes.VERIFY

    def __init__(self, chunk_size: int = None):
        super().__init__(chunk_size)
        self.solver = SolveService(self.chunk_size)

    def residuals(self, run_config: RunConfig, solved: SolvedProblem) -> List[ResidualEntry]:
        checks = run_config.verification
        mesh = solved.mesh
        points = checks.points or [tuple(float(c) for c in mesh.center())]
        entries = []
        for point in points:
            window = checks.window.window(mesh.diameter)
            for level in range(checks.refinements + 1):
                report = bem_residual(solved.density, solved.order, point, window)
                self.logger.info(
                    f"Residual at {list(point)} level {level}: {report.value:.3e} "
                    f"(uncertainty {report.uncertainty:.2e})"
                )
                entries.append(ResidualEntry(point=tuple(point), level=level, report=report))
                window = window.refined()
        return entries

    def far_field(self, run_config: RunConfig, solved: SolvedProblem) -> FarFieldTable:
        checks = run_config.verification
        diameter = solved.mesh.diameter
        radii = checks.far_field_radii or [f * diameter for f in (4.0, 8.0, 16.0, 32.0)]
        table = far_field_decay(solved.density, solved.order, radii, checks.far_field_directions)
        self.logger.info(f"Far field: {len(table.rows)} samples, {len(table.violations)} violation(s)")
        return table

    def run(self, run_config: RunConfig) -> VerifyResult:
        solved = self.solver.prepare(run_config)
        return VerifyResult(
            solve=self.solver.result(run_config, solved),
            residuals=self.residuals(run_config, solved),
            far_field=self.far_field(run_config, solved),
        )

    def summary_rows(self, result: VerifyResult) -> list:
        worst = max(result.residuals, key=lambda e: abs(e.report.value), default=None)
        rows = [("residual points", str(len({e.point for e in result.residuals})))]
        if worst is not None:
            rows.append(("max |residual|", f"{abs(worst.report.value):.3e}"))
            rows.append(("its uncertainty", f"{worst.report.uncertainty:.3e}"))
        finest = [e for e in result.residuals if e.level == max(r.level for r in result.residuals)]
        if finest:
            within = sum(abs(e.report.value) <= e.report.uncertainty for e in finest)
            rows.append(("within bounds (finest)", f"{within}/{len(finest)}"))
        if result.far_field is not None:
            rows.append(("far-field violations", str(len(result.far_field.violations))))
        rows.append(("density L1", f"{result.solve.summary.density_l1:.6g}"))
        return rows
