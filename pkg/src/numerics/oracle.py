"""
Verification oracle.

Evaluates the fractional Laplacian of sampled functions pointwise by
truncated singular-integral quadrature with explicit tail bounds, checks the
Fourier decay of the truncated kernel, and measures far-field decay of
single-layer potentials.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .bem import BoundaryDensity, single_layer_values
from .errors import ConfigurationError, DataError, DomainError, OracleError
from .geometry import PanelMesh
from .interfaces import PointFunction
from .quadrature import composite_rule, geometric_breakpoints, graded_breakpoints
from .specfun import FracOrder, bessel_j0, flap_constant, riesz_constant, unit_sphere_area

logger = logging.getLogger(__name__)


class OracleConstants:
    """Quadrature layout of the oracle"""
    RADIAL_RATIO: float = 1.5
    ANGULAR_PANEL_NODES: int = 8
    GRADING_RATIO: float = 0.25
    GRADING_LEVELS: int = 10
    SYMBOL_NODES: int = 16
    SYMBOL_TOLERANCE: float = 1e-8
    FAR_FIELD_GROWTH: float = 0.10
    DEFAULT_R_INNER: float = 1e-3
    DEFAULT_R_OUTER: float = 1e3
    DEFAULT_N_RADIAL: int = 8
    DEFAULT_N_ANGULAR: int = 64
    SYMBOL_RANGES: dict = {2: (0.5, 0.75, True), 3: (0.0, 1.0, False)}


class TruncationWindow(BaseModel):
    """Annulus r_inner <= |z| <= r_outer and quadrature densities"""
    model_config = ConfigDict(frozen=True)

    r_inner: float = Field(gt=0)
    r_outer: float = Field(gt=0)
    n_radial: int = Field(ge=8)
    n_angular: int = Field(ge=8)

    @model_validator(mode='after')
    def _validate_radii(self) -> "TruncationWindow":
        if not self.r_inner < self.r_outer:
            raise ValueError(f"r_inner ({self.r_inner}) must be below r_outer ({self.r_outer})")
        return self

    @classmethod
    def default(cls, scale: float = 1.0) -> "TruncationWindow":
        return cls(r_inner=OracleConstants.DEFAULT_R_INNER * scale, r_outer=OracleConstants.DEFAULT_R_OUTER,
                   n_radial=OracleConstants.DEFAULT_N_RADIAL, n_angular=OracleConstants.DEFAULT_N_ANGULAR)

    def refined(self) -> "TruncationWindow":
        return TruncationWindow(r_inner=0.5 * self.r_inner, r_outer=self.r_outer,
                                n_radial=2 * self.n_radial, n_angular=2 * self.n_angular)


class ResidualReport(BaseModel):
    """Truncated fractional Laplacian and bounds on the omitted parts"""
    model_config = ConfigDict(frozen=True)

    value: float
    inner_tail: float = Field(ge=0)
    outer_tail: float = Field(ge=0)
    window: TruncationWindow
    density_l1: Optional[float] = None

    @computed_field
    @property
    def uncertainty(self) -> float:
        return self.inner_tail + self.outer_tail


class SingularityHints(BaseModel):
    """Where a sampled function fails to be smooth"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: List[Tuple[float, ...]] = Field(default_factory=list)
    boundary: Optional[PanelMesh] = None


class SymbolSample(BaseModel):
    r: float
    symbol: float
    bound_ratio: float


class FarFieldRow(BaseModel):
    radius: float
    direction: Tuple[float, float]
    value: float
    scaled: float


class FarFieldTable(BaseModel):
    rows: List[FarFieldRow]
    violations: List[Tuple[float, float]] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample(u: PointFunction, points: np.ndarray) -> np.ndarray:
    values = np.broadcast_to(np.asarray(u(points), dtype=float), (len(points),))
    if not np.all(np.isfinite(values)):
        raise DataError("sampled function is not finite at an oracle node")
    return values


def _radial_breakpoints(window: TruncationWindow, singular_radii: Sequence[float]) -> np.ndarray:
    ratio = OracleConstants.RADIAL_RATIO
    parts = [geometric_breakpoints(window.r_inner, window.r_outer, ratio)]
    for rho in singular_radii:
        if window.r_inner < rho < window.r_outer:
            parts.append(graded_breakpoints(rho, max(window.r_inner, rho / ratio), min(window.r_outer, rho * ratio),
                                            OracleConstants.GRADING_RATIO, OracleConstants.GRADING_LEVELS))
    return np.unique(np.concatenate(parts))


def _radial_rule(window: TruncationWindow, singular_radii: Sequence[float],
                 alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Radial nodes and weights including the r^(-1-2 alpha) factor"""
    nodes, weights = composite_rule(_radial_breakpoints(window, singular_radii), window.n_radial)
    return nodes, weights * nodes ** (-1.0 - 2.0 * alpha)


def _angular_panels(window: TruncationWindow) -> int:
    return max(1, math.ceil(window.n_angular / OracleConstants.ANGULAR_PANEL_NODES))


def _polar_angles(x: np.ndarray, window: TruncationWindow, hints: SingularityHints) -> np.ndarray:
    panels = _angular_panels(window)
    parts = [np.linspace(0.0, 2.0 * math.pi, panels + 1)]
    width = 2.0 * math.pi / panels
    for point in hints.points:
        rel = np.asarray(point, dtype=float) - x
        if np.linalg.norm(rel) == 0:
            continue
        theta = math.atan2(rel[1], rel[0]) % (2.0 * math.pi)
        graded = graded_breakpoints(theta, theta - width, theta + width,
                                    OracleConstants.GRADING_RATIO, OracleConstants.GRADING_LEVELS)
        parts.append(np.mod(graded, 2.0 * math.pi))
    if hints.boundary is not None:
        rel = hints.boundary.vertices - x
        parts.append(np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2.0 * math.pi))
    angles = np.unique(np.concatenate(parts))
    angles = angles[angles < 2.0 * math.pi]
    return np.append(angles, 2.0 * math.pi)


def _ray_crossings(x: np.ndarray, directions: np.ndarray, mesh: PanelMesh) -> List[np.ndarray]:
    """Distances along each ray from x to the panels it crosses"""
    edge = mesh.ends - mesh.starts
    offset = mesh.starts - x
    # Solve r * w - t * e = s0 - x for every (ray, panel)
    det = -directions[:, 0:1] * edge[None, :, 1] + directions[:, 1:2] * edge[None, :, 0]
    safe = np.where(np.abs(det) > 1e-300, det, np.nan)
    r = (-offset[None, :, 0] * edge[None, :, 1] + offset[None, :, 1] * edge[None, :, 0]) / safe
    t = (directions[:, 0:1] * offset[None, :, 1] - directions[:, 1:2] * offset[None, :, 0]) / safe
    hit = (t >= 0.0) & (t <= 1.0) & (r > 0.0)
    return [r[k][hit[k]] for k in range(len(directions))]


def _polar_rule(x: np.ndarray, window: TruncationWindow, hints: SingularityHints,
                alpha: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample points, weights and radii of the planar annulus rule"""
    singular_radii = [float(np.linalg.norm(np.asarray(p, dtype=float) - x)) for p in hints.points]
    theta, theta_w = composite_rule(_polar_angles(x, window, hints), OracleConstants.ANGULAR_PANEL_NODES)
    directions = np.stack([np.cos(theta), np.sin(theta)], axis=1)

    if hints.boundary is None:
        r, r_w = _radial_rule(window, singular_radii, alpha)
        points = x + (r[None, :, None] * directions[:, None, :]).reshape(-1, 2)
        weights = (theta_w[:, None] * r_w[None, :]).ravel()
        radii = np.broadcast_to(r[None, :], (len(theta), len(r))).ravel()
        return points, weights, radii

    crossings = _ray_crossings(x, directions, hints.boundary)
    points, weights, radii = [], [], []
    for k in range(len(theta)):
        r, r_w = _radial_rule(window, singular_radii + crossings[k].tolist(), alpha)
        points.append(x + r[:, None] * directions[k])
        weights.append(theta_w[k] * r_w)
        radii.append(r)
    return np.concatenate(points), np.concatenate(weights), np.concatenate(radii)


def _pole_frame(pole: np.ndarray) -> np.ndarray:
    """Orthonormal frame whose third column is the unit vector pole"""
    e3 = pole / np.linalg.norm(pole)
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - (helper @ e3) * e3
    e1 /= np.linalg.norm(e1)
    return np.stack([e1, np.cross(e3, e1), e3], axis=1)


def _spherical_rule(x: np.ndarray, window: TruncationWindow, hints: SingularityHints,
                    alpha: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample points, weights and radii of the spatial shell rule"""
    if hints.boundary is not None:
        raise ConfigurationError("boundary hints are planar only")
    panels = _angular_panels(window)
    polar_panels = max(1, panels // 2)
    polar_parts = [np.linspace(0.0, math.pi, polar_panels + 1)]
    pole = np.array([0.0, 0.0, 1.0])
    singular_radii = []
    for point in hints.points:
        rel = np.asarray(point, dtype=float) - x
        rho = float(np.linalg.norm(rel))
        if rho == 0:
            continue
        singular_radii.append(rho)
        if len(singular_radii) == 1:
            pole = rel
            polar_parts.append(graded_breakpoints(0.0, 0.0, math.pi / polar_panels,
                                                  OracleConstants.GRADING_RATIO, OracleConstants.GRADING_LEVELS))
    beta, beta_w = composite_rule(np.unique(np.concatenate(polar_parts)), OracleConstants.ANGULAR_PANEL_NODES)
    phi, phi_w = composite_rule(np.linspace(0.0, 2.0 * math.pi, panels + 1), OracleConstants.ANGULAR_PANEL_NODES)
    r, r_w = _radial_rule(window, singular_radii, alpha)

    local = np.stack([
        np.sin(beta)[:, None] * np.cos(phi)[None, :],
        np.sin(beta)[:, None] * np.sin(phi)[None, :],
        np.broadcast_to(np.cos(beta)[:, None], (len(beta), len(phi))),
    ], axis=-1).reshape(-1, 3)
    directions = local @ _pole_frame(pole).T
    angular_w = (beta_w[:, None] * np.sin(beta)[:, None] * phi_w[None, :]).ravel()

    points = x + (r[None, :, None] * directions[:, None, :]).reshape(-1, 3)
    weights = (angular_w[:, None] * r_w[None, :]).ravel()
    radii = np.broadcast_to(r[None, :], (len(directions), len(r))).ravel()
    return points, weights, radii


def pointwise_flap(u: PointFunction, order: FracOrder, x,
                   window: TruncationWindow, hints: Optional[SingularityHints] = None) -> ResidualReport:
    """
    Truncated singular-integral value of -(-Delta)^alpha u at x.

    value = flap_c * int_{r_inner <= |z| <= r_outer} (u(x + z) - u(x)) / |z|^(d + 2 alpha) dz

    The inner tail bounds the omitted ball through second differences with
    step r_inner; the outer tail bounds the omitted exterior through the
    largest sample in the outermost radial panel.

    Args:
        u: Function of points (K, d)
        order: Dimension and order (relaxed orders accepted)
        x: Evaluation point
        window: Truncation annulus and densities
        hints: Singular points or a boundary mesh that drive breakpoints

    Raises:
        DataError: u is not finite at a sample
    """
    d, alpha = order.d, order.alpha
    x = np.asarray(x, dtype=float).reshape(d)
    hints = hints or SingularityHints()
    flap_c = flap_constant(order)
    sphere = unit_sphere_area(d)

    if d == 2:
        points, weights, radii = _polar_rule(x, window, hints, alpha)
    else:
        points, weights, radii = _spherical_rule(x, window, hints, alpha)

    step = window.r_inner
    stencil = np.concatenate([x[None, :], x + step * np.eye(d), x - step * np.eye(d)])
    center_values = _sample(u, stencil)
    ux = center_values[0]
    samples = _sample(u, points)

    value = flap_c * float(np.sum(weights * (samples - ux)))

    second = center_values[1:d + 1] + center_values[d + 1:] - 2.0 * ux
    curvature = float(np.sum(np.abs(second))) / step ** 2
    inner_tail = (2.0 * flap_c * curvature / (2.0 * d) * sphere
                  * window.r_inner ** (2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha))

    outermost = radii >= window.r_outer / OracleConstants.RADIAL_RATIO
    sup_u = float(np.max(np.abs(samples[outermost]))) if np.any(outermost) else 0.0
    outer_tail = flap_c * (sup_u + abs(ux)) * sphere * window.r_outer ** (-2.0 * alpha) / (2.0 * alpha)

    logger.debug(
        f"Oracle at {x.tolist()}: {len(points)} samples, value {value:.6e}, "
        f"tails {inner_tail:.2e} / {outer_tail:.2e}"
    )
    return ResidualReport(value=value, inner_tail=inner_tail, outer_tail=outer_tail, window=window)


def bem_residual(density: BoundaryDensity, order: FracOrder, x,
                 window: TruncationWindow) -> ResidualReport:
    """
    Oracle applied to the single-layer potential of a density.

    Raises:
        DomainError: x closer to the boundary than 2 * r_inner
    """
    x = np.asarray(x, dtype=float).reshape(2)
    mesh = density.mesh
    gap = float(mesh.distance(x[None, :])[0])
    if gap <= 2.0 * window.r_inner:
        raise DomainError(f"point {x.tolist()} is within 2*r_inner of the boundary (distance {gap:.3e})")

    def potential(points: np.ndarray) -> np.ndarray:
        return single_layer_values(density, order, points)

    report = pointwise_flap(potential, order, x, window, SingularityHints(boundary=mesh))
    return report.model_copy(update={"density_l1": density.l1_norm()})


def _cutoff(s: np.ndarray, radius: float) -> np.ndarray:
    """C^2 quintic blend: 1 on [0, R], 0 beyond 2R"""
    t = np.clip((s - radius) / radius, 0.0, 1.0)
    return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _check_symbol_order(order: FracOrder) -> None:
    low, high, high_closed = OracleConstants.SYMBOL_RANGES[order.d]
    alpha = order.alpha
    if not (low < alpha and (alpha <= high if high_closed else alpha < high)):
        raise ConfigurationError(f"alpha out of admissible range for the symbol check: alpha={alpha}, d={order.d}")


def _symbol_value(order: FracOrder, radius: float, r: float, nodes_per_panel: int) -> float:
    d, alpha = order.d, order.alpha
    width = 0.25 * radius if r == 0 else min(0.25 * radius, 0.5 * math.pi / r)
    count = max(1, math.ceil(2.0 * radius / width))
    # Keep s r small on the first panel so the substituted integrand stays smooth
    head_end = width if r == 0 else min(width, 0.01 / r)
    parts = [[0.0, radius], np.linspace(0.0, 2.0 * radius, count + 1)]
    if head_end < width:
        parts.append(geometric_breakpoints(head_end, width, 2.0))
    edges = np.unique(np.concatenate(parts))

    def radial(s):
        if d == 2:
            return bessel_j0(s * r)
        return np.sinc(s * r / math.pi)

    # First panel: s = s1 t^(1 / 2 alpha) absorbs s^(2 alpha - 1) ds
    s1 = edges[1]
    t, w = composite_rule([0.0, 1.0], nodes_per_panel)
    s = s1 * t ** (1.0 / (2.0 * alpha))
    head = s1 ** (2.0 * alpha) / (2.0 * alpha) * float(np.sum(w * _cutoff(s, radius) * radial(s)))

    s, w = composite_rule(edges[1:], nodes_per_panel)
    body = float(np.sum(w * s ** (2.0 * alpha - 1.0) * _cutoff(s, radius) * radial(s)))
    return riesz_constant(order) * unit_sphere_area(d) * (head + body)


def symbol_decay_check(order: FracOrder, cutoff_radius: float, r_values: Sequence[float]) -> List[SymbolSample]:
    """
    Fourier transform of the smoothly truncated Riesz kernel.

    Raises:
        ConfigurationError: Order outside the potential-mapping range
        OracleError: The quadrature disagrees with a doubled rule
    """
    _check_symbol_order(order)
    if cutoff_radius <= 0:
        raise ConfigurationError(f"cutoff radius must be positive, got {cutoff_radius}")
    samples = []
    for r in r_values:
        r = float(r)
        if not r >= 0:
            raise DomainError(f"frequency must be non-negative, got {r}")
        coarse = _symbol_value(order, cutoff_radius, r, OracleConstants.SYMBOL_NODES)
        fine = _symbol_value(order, cutoff_radius, r, 2 * OracleConstants.SYMBOL_NODES)
        scale = max(abs(fine), (1.0 + r * r) ** (-order.alpha))
        if abs(fine - coarse) > OracleConstants.SYMBOL_TOLERANCE * scale:
            raise OracleError(f"symbol quadrature did not converge at r={r}: {coarse:.12e} vs {fine:.12e}")
        samples.append(SymbolSample(r=r, symbol=fine, bound_ratio=abs(fine) * (1.0 + r * r) ** order.alpha))
    return samples


def normalization_constant(order: FracOrder, cutoff_radius: float, r: float) -> float:
    """symbol(r) * r^(2 alpha); tends to 1 for large r"""
    return symbol_decay_check(order, cutoff_radius, [r])[0].symbol * r ** (2.0 * order.alpha)


def far_field_decay(density: BoundaryDensity, order: FracOrder, radii: Sequence[float],
                    directions) -> FarFieldTable:
    """
    Scaled potential |u(c + R w)| R^(d - 2 alpha) along rays from the mesh center.

    Args:
        directions: Number of equally spaced directions, or an array of unit vectors

    Raises:
        DomainError: A radius within twice the diameter
    """
    mesh = density.mesh
    radii = sorted(float(r) for r in radii)
    limit = 2.0 * mesh.diameter
    if not radii or radii[0] <= limit:
        raise DomainError(f"far-field radii must exceed 2*diameter = {limit:.6g}")
    if isinstance(directions, (int, np.integer)):
        angles = 2.0 * math.pi * np.arange(int(directions)) / int(directions)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        dirs = np.asarray(directions, dtype=float).reshape(-1, 2)
        dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)

    center = mesh.center()
    exponent = order.d - 2.0 * order.alpha
    rows, violations = [], []
    for w in dirs:
        points = center + np.asarray(radii)[:, None] * w
        values = single_layer_values(density, order, points)
        scaled = np.abs(values) * np.asarray(radii) ** exponent
        direction = (float(w[0]), float(w[1]))
        rows.extend(FarFieldRow(radius=R, direction=direction, value=float(v), scaled=float(s))
                    for R, v, s in zip(radii, values, scaled))
        if scaled[-1] > (1.0 + OracleConstants.FAR_FIELD_GROWTH) * scaled[0]:
            violations.append(direction)
    if violations:
        logger.warning(f"Far-field decay violated along {len(violations)} direction(s)")
    return FarFieldTable(rows=rows, violations=violations)
