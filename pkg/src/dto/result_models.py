"""
Result records written by the workflows.
Follows SRP - Single responsibility for what a run reports.
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from ..numerics.oracle import FarFieldTable, ResidualReport, SymbolSample


class SolveSummary(BaseModel):
    """Diagnostics of one boundary solve"""
    n_panels: int
    alpha: float
    density_l1: float
    total_mass: float
    condition_estimate: Optional[float] = None
    min_eigenvalue: float
    max_eigenvalue: float
    spd: bool
    solver_residual: float
    symmetry_defect: float
    factorization: str


class SolutionSample(BaseModel):
    x: float
    y: float
    u1: float
    u2: float

    @property
    def u(self) -> float:
        return self.u1 + self.u2


class ResidualEntry(BaseModel):
    """Oracle report for one verification point at one window level"""
    point: Tuple[float, float]
    level: int = Field(ge=0)
    report: ResidualReport


class ConvergenceRow(BaseModel):
    n_panels: int
    error: float
    ratio: Optional[float] = None
    min_eigenvalue: float
    max_eigenvalue: float


class SolveResult(BaseModel):
    summary: SolveSummary
    density_rows: List[Tuple[int, float, float, float]]
    solution: List[SolutionSample] = Field(default_factory=list)


class VerifyResult(BaseModel):
    solve: SolveResult
    residuals: List[ResidualEntry]
    far_field: Optional[FarFieldTable] = None


class ConvergeResult(BaseModel):
    rows: List[ConvergenceRow]


class SymbolResult(BaseModel):
    samples: List[SymbolSample]
