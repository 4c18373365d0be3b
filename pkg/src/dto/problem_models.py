"""
Run configuration models and DTOs.
Follows SRP - Single responsibility for the description of a run; the
numerics never read JSON themselves.
"""
import hashlib
import json
import math
from typing import Annotated, Callable, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..numerics.errors import ConfigurationError
from ..numerics.geometry import Circle, Ellipse, Polygon, PointLocation, unit_square
from ..numerics.oracle import OracleConstants, TruncationWindow
from ..numerics.spectral import mode_function
from ..numerics.specfun import FracOrder


class RunModes:
    """Names of the run modes - SRP: Single responsibility for constants"""
    SOLVE: str = "solve"
    VERIFY: str = "verify"
    CONVERGE: str = "converge"
    SYMBOL_CHECK: str = "symbol-check"
    ALL: tuple = (SOLVE, VERIFY, CONVERGE, SYMBOL_CHECK)


class UnitSquareGeometry(BaseModel):
    """The unit square [0, 1]^2, the only geometry carrying volume data"""
    kind: Literal["unit_square"] = "unit_square"

    def to_curve(self) -> Polygon:
        return unit_square()


GeometrySpec = Annotated[Union[Circle, Ellipse, Polygon, UnitSquareGeometry], Field(discriminator='kind')]


def as_curve(geometry) -> Union[Circle, Ellipse, Polygon]:
    return geometry.to_curve() if isinstance(geometry, UnitSquareGeometry) else geometry


def is_unit_square(geometry) -> bool:
    if isinstance(geometry, UnitSquareGeometry):
        return True
    if isinstance(geometry, Polygon):
        return sorted(geometry.vertices) == sorted(unit_square().vertices)
    return False


class ConstantData(BaseModel):
    """g = value"""
    kind: Literal["constant"] = "constant"
    value: float = 1.0

    def function(self) -> Callable[[np.ndarray], np.ndarray]:
        value = self.value
        return lambda points: np.full(len(points), value)


class CoordinateData(BaseModel):
    """g = scale * x[axis]"""
    kind: Literal["coordinate"] = "coordinate"
    axis: Literal[0, 1] = 0
    scale: float = 1.0

    def function(self) -> Callable[[np.ndarray], np.ndarray]:
        axis, scale = self.axis, self.scale
        return lambda points: scale * np.asarray(points)[:, axis]


class ManufacturedDensity(BaseModel):
    """
    Known density G*(theta) = mean + amplitude * cos(frequency * theta).

    theta is the polar angle about the curve center; the boundary data is
    the trace of its single-layer potential.
    """
    kind: Literal["manufactured"] = "manufactured"
    mean: float = 1.0
    amplitude: float = 0.5
    frequency: int = Field(default=1, ge=0)

    def density_function(self, center) -> Callable[[np.ndarray], np.ndarray]:
        cx, cy = float(center[0]), float(center[1])
        mean, amplitude, k = self.mean, self.amplitude, self.frequency

        def density(points: np.ndarray) -> np.ndarray:
            pts = np.asarray(points, dtype=float)
            theta = np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx)
            return mean + amplitude * np.cos(k * theta)

        return density


BoundaryDataSpec = Annotated[Union[ConstantData, CoordinateData, ManufacturedDensity], Field(discriminator='kind')]


class ZeroVolume(BaseModel):
    kind: Literal["zero"] = "zero"

    @property
    def is_zero(self) -> bool:
        return True


class SineModes(BaseModel):
    """f = sum amplitude * sin(m pi x) sin(n pi y) on the unit square"""
    kind: Literal["sine_modes"] = "sine_modes"
    modes: List[Tuple[int, int, float]] = Field(min_length=1)

    @field_validator('modes')
    @classmethod
    def validate_modes(cls, v):
        for m, n, amplitude in v:
            if m < 1 or n < 1:
                raise ValueError(f"sine mode indices must be >= 1, got ({m}, {n})")
            if not math.isfinite(amplitude):
                raise ValueError("sine mode amplitudes must be finite")
        return v

    @property
    def is_zero(self) -> bool:
        return all(amplitude == 0 for _, _, amplitude in self.modes)

    def function(self) -> Callable[[np.ndarray], np.ndarray]:
        return mode_function(self.modes)


VolumeDataSpec = Annotated[Union[ZeroVolume, SineModes], Field(discriminator='kind')]


class ProblemSpec(BaseModel):
    """Dimension, order, geometry and data of one boundary value problem"""
    dimension: int = 2
    alpha: float
    geometry: GeometrySpec = Field(default_factory=UnitSquareGeometry)
    boundary_data: BoundaryDataSpec = Field(default_factory=ConstantData)
    volume_data: VolumeDataSpec = Field(default_factory=ZeroVolume)

    @field_validator('dimension')
    @classmethod
    def validate_dimension(cls, v):
        if v not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {v}")
        return v

    @model_validator(mode='after')
    def _validate_volume_data(self) -> "ProblemSpec":
        if not self.volume_data.is_zero and not is_unit_square(self.geometry):
            raise ValueError("nonzero volume data requires the unit square geometry")
        return self

    def curve(self):
        return as_curve(self.geometry)

    def order(self) -> FracOrder:
        """Order within the solvability range of the boundary problem"""
        return FracOrder(self.dimension, self.alpha)


class DiscretizationSpec(BaseModel):
    n_panels: int = Field(default=64, ge=3)
    quad_order: int = Field(default=8, ge=1, le=64)
    spectral_order: int = Field(default=32, ge=1)
    spectral_density: int = Field(default=4, ge=1)
    reference_refinement: int = Field(default=4, ge=1)


class GridSpec(BaseModel):
    """Cell-centered nx x ny grid over bounds (default: the curve's bounding box)"""
    nx: int = Field(default=10, ge=1)
    ny: int = Field(default=10, ge=1)
    bounds: Optional[Tuple[float, float, float, float]] = None

    def points(self, default_bounds: Tuple[float, float, float, float]) -> np.ndarray:
        x0, x1, y0, y1 = self.bounds or default_bounds
        xs = x0 + (np.arange(self.nx) + 0.5) * (x1 - x0) / self.nx
        ys = y0 + (np.arange(self.ny) + 0.5) * (y1 - y0) / self.ny
        return np.stack(np.meshgrid(xs, ys, indexing='ij'), axis=-1).reshape(-1, 2)


class EvaluationSpec(BaseModel):
    points: List[Tuple[float, float]] = Field(default_factory=list)
    grid: Optional[GridSpec] = None


class WindowSpec(BaseModel):
    """Truncation window; r_inner defaults to 1e-3 times the diameter"""
    r_inner: Optional[float] = Field(default=None, gt=0)
    r_outer: float = Field(default=OracleConstants.DEFAULT_R_OUTER, gt=0)
    n_radial: int = Field(default=OracleConstants.DEFAULT_N_RADIAL, ge=8)
    n_angular: int = Field(default=OracleConstants.DEFAULT_N_ANGULAR, ge=8)

    def window(self, scale: float) -> TruncationWindow:
        r_inner = self.r_inner if self.r_inner is not None else OracleConstants.DEFAULT_R_INNER * scale
        return TruncationWindow(r_inner=r_inner, r_outer=self.r_outer,
                                n_radial=self.n_radial, n_angular=self.n_angular)


class VerificationSpec(BaseModel):
    points: List[Tuple[float, float]] = Field(default_factory=list)
    window: WindowSpec = Field(default_factory=WindowSpec)
    refinements: int = Field(default=1, ge=0)
    far_field_radii: List[float] = Field(default_factory=list)
    far_field_directions: int = Field(default=8, ge=1)


class ConvergenceSpec(BaseModel):
    panel_counts: List[int] = Field(default_factory=lambda: [16, 32, 64])

    @field_validator('panel_counts')
    @classmethod
    def validate_panel_counts(cls, v):
        if not v:
            raise ValueError("panel_counts must not be empty")
        if any(n < 3 for n in v):
            raise ValueError(f"every panel count must be >= 3, got {v}")
        return sorted(v)


class SymbolCheckSpec(BaseModel):
    cutoff_radius: float = Field(default=1.0, gt=0)
    r_values: List[float] = Field(default_factory=lambda: [1.0, 10.0, 100.0])

    @field_validator('r_values')
    @classmethod
    def validate_r_values(cls, v):
        if not v or any(not r > 0 for r in v):
            raise ValueError("r_values must be a non-empty list of positive numbers")
        return v


class OutputSpec(BaseModel):
    directory: str = "results"
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])


class RunConfig(BaseModel):
    """
    One run of the solver.

    The admissible orders depend on the mode: boundary-element modes need
    the solvability range, the symbol check accepts the potential-mapping
    range.
    """
    model_config = ConfigDict(extra='forbid')

    mode: Literal["solve", "verify", "converge", "symbol-check"] = "solve"
    problem: ProblemSpec
    discretization: DiscretizationSpec = Field(default_factory=DiscretizationSpec)
    evaluation: EvaluationSpec = Field(default_factory=EvaluationSpec)
    verification: VerificationSpec = Field(default_factory=VerificationSpec)
    convergence: ConvergenceSpec = Field(default_factory=ConvergenceSpec)
    symbol_check: SymbolCheckSpec = Field(default_factory=SymbolCheckSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode='after')
    def _validate_order_for_mode(self) -> "RunConfig":
        if self.mode == RunModes.SYMBOL_CHECK:
            self.symbol_order()
        else:
            if self.problem.dimension != 2:
                raise ValueError(f"mode '{self.mode}' needs dimension 2, got {self.problem.dimension}")
            self.problem.order()
        if self.mode == RunModes.CONVERGE and not isinstance(self.problem.boundary_data, ManufacturedDensity):
            raise ValueError("mode 'converge' needs manufactured boundary data")
        return self

    @model_validator(mode='after')
    def _validate_points_off_boundary(self) -> "RunConfig":
        checked = {}
        if self.mode in (RunModes.SOLVE, RunModes.VERIFY):
            checked['evaluation.points'] = self.evaluation.points
        if self.mode == RunModes.VERIFY:
            checked['verification.points'] = self.verification.points
        curve = self.problem.curve()
        for field, points in checked.items():
            if not points:
                continue
            labels = curve.classify_points(points)
            on_boundary = [list(p) for p, label in zip(points, labels) if label == PointLocation.BOUNDARY]
            if on_boundary:
                raise ValueError(f"{field} on the boundary: {on_boundary}")
        return self

    def order(self) -> FracOrder:
        return self.problem.order()

    def symbol_order(self) -> FracOrder:
        low, high, high_closed = OracleConstants.SYMBOL_RANGES[self.problem.dimension]
        alpha = self.problem.alpha
        if not (low < alpha and (alpha <= high if high_closed else alpha < high)):
            raise ConfigurationError(
                f"alpha out of admissible range: alpha={alpha} for the symbol check in d={self.problem.dimension}"
            )
        return FracOrder.relaxed(self.problem.dimension, alpha)

    def with_mode(self, mode: Optional[str]) -> "RunConfig":
        """Same configuration under another mode, validated again"""
        if mode is None or mode == self.mode:
            return self
        data = self.model_dump(mode='json')
        data['mode'] = mode
        return RunConfig.model_validate(data)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form, output directory excluded"""
        data = self.model_dump(mode='json')
        data['output'].pop('directory', None)
        canonical = json.dumps(data, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
