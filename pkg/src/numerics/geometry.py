"""
Boundary curves, straight-panel meshes and Gauss-Legendre rules.
Follows SRP - Single responsibility for geometry; no kernel knowledge here.
"""
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import ellipe

from .errors import ConfigurationError, DataError
from .interfaces import Classifiable

logger = logging.getLogger(__name__)


class GeometryConstants:
    """Tolerances shared by classification and meshing"""
    BOUNDARY_TOLERANCE: float = 1e-12  # relative to the diameter
    MIN_QUASI_UNIFORMITY: float = 0.1
    MAX_GAUSS_NODES: int = 64


class PointLocation(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    BOUNDARY = "boundary"


def rotation_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[-1] != 2:
        raise ConfigurationError(f"expected planar points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DataError("points must be finite")
    return pts


def point_segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Distance from points to segments [a, b], broadcasting over leading axes.

    Args:
        points: (..., 2) query points
        a: (..., 2) segment starts
        b: (..., 2) segment ends

    Returns:
        Distances with the broadcast leading shape
    """
    ab = b - a
    ap = points - a
    denom = np.sum(ab * ab, axis=-1)
    t = np.clip(np.sum(ap * ab, axis=-1) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(points - closest, axis=-1)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def segment_distance(p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Distance between segments [p0, p1] and [q0, q1], zero when they cross"""
    d1 = _cross(p1 - p0, q0 - p0)
    d2 = _cross(p1 - p0, q1 - p0)
    d3 = _cross(q1 - q0, p0 - q0)
    d4 = _cross(q1 - q0, p1 - q0)
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
    dist = np.minimum.reduce([
        point_segment_distance(q0, p0, p1),
        point_segment_distance(q1, p0, p1),
        point_segment_distance(p0, q0, q1),
        point_segment_distance(p1, q0, q1),
    ])
    return np.where(crossing, 0.0, dist)


def winding_numbers(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Winding number of a closed polygon around each point"""
    pts = points[:, None, :]
    v0 = vertices[None, :, :]
    v1 = np.roll(vertices, -1, axis=0)[None, :, :]
    side = _cross(v1 - v0, pts - v0)
    y = pts[..., 1]
    upward = (v0[..., 1] <= y) & (v1[..., 1] > y) & (side > 0)
    downward = (v0[..., 1] > y) & (v1[..., 1] <= y) & (side < 0)
    return upward.sum(axis=1) - downward.sum(axis=1)


def _classify_polygonal(points: np.ndarray, vertices: np.ndarray, tolerance: float) -> List[PointLocation]:
    starts = vertices
    ends = np.roll(vertices, -1, axis=0)
    dist = point_segment_distance(points[:, None, :], starts[None], ends[None]).min(axis=1)
    winding = winding_numbers(points, vertices)
    return [
        PointLocation.BOUNDARY if dist[i] < tolerance
        else PointLocation.INTERIOR if winding[i] != 0
        else PointLocation.EXTERIOR
        for i in range(len(points))
    ]


class _CurveBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    def classify_points(self, points) -> List[PointLocation]:
        """Classify points as interior, exterior or on the curve"""
        pts = _as_points(points)
        tolerance = GeometryConstants.BOUNDARY_TOLERANCE * self.diameter()
        dist = self.distance(pts)
        inside = self._inside(pts)
        return [
            PointLocation.BOUNDARY if dist[i] < tolerance
            else PointLocation.INTERIOR if inside[i]
            else PointLocation.EXTERIOR
            for i in range(len(pts))
        ]


class Circle(_CurveBase):
    kind: Literal["circle"] = "circle"
    center: Tuple[float, float] = (0.0, 0.0)
    radius: float = Field(default=1.0, gt=0)

    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    def diameter(self) -> float:
        return 2.0 * self.radius

    def point_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.radius * np.cos(t),
                         self.center[1] + self.radius * np.sin(t)], axis=-1)

    def distance(self, points) -> np.ndarray:
        pts = _as_points(points)
        return np.abs(np.linalg.norm(pts - np.asarray(self.center), axis=-1) - self.radius)

    def _inside(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(pts - np.asarray(self.center), axis=-1) < self.radius

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), scale: float = 1.0) -> "Circle":
        center = scale * rotation_matrix(angle) @ np.asarray(self.center) + np.asarray(shift, dtype=float)
        return Circle(center=tuple(center), radius=scale * self.radius)


class Ellipse(_CurveBase):
    kind: Literal["ellipse"] = "ellipse"
    center: Tuple[float, float] = (0.0, 0.0)
    semi_axes: Tuple[float, float]
    rotation: float = 0.0

    @field_validator('semi_axes')
    @classmethod
    def validate_semi_axes(cls, v):
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError(f"semi-axes must be positive, got {v}")
        return v

    def perimeter(self) -> float:
        a, b = max(self.semi_axes), min(self.semi_axes)
        return 4.0 * a * float(ellipe(1.0 - (b / a) ** 2))

    def diameter(self) -> float:
        return 2.0 * max(self.semi_axes)

    def point_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        local = np.stack([self.semi_axes[0] * np.cos(t), self.semi_axes[1] * np.sin(t)], axis=-1)
        return local @ rotation_matrix(self.rotation).T + np.asarray(self.center)

    def _local(self, pts: np.ndarray) -> np.ndarray:
        return (pts - np.asarray(self.center)) @ rotation_matrix(self.rotation)

    def _inside(self, pts: np.ndarray) -> np.ndarray:
        loc = self._local(pts)
        a, b = self.semi_axes
        return (loc[:, 0] / a) ** 2 + (loc[:, 1] / b) ** 2 < 1.0

    def distance(self, points) -> np.ndarray:
        """Distance to the ellipse by Newton iteration on the foot-point parameter"""
        loc = self._local(_as_points(points))
        a, b = self.semi_axes
        x, y = loc[:, 0], loc[:, 1]
        samples = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
        gap = (a * np.cos(samples)[None] - x[:, None]) ** 2 + (b * np.sin(samples)[None] - y[:, None]) ** 2
        t = samples[np.argmin(gap, axis=1)]
        for _ in range(12):
            s, c = np.sin(t), np.cos(t)
            g = (b * b - a * a) * s * c + a * x * s - b * y * c
            dg = (b * b - a * a) * (c * c - s * s) + a * x * c + b * y * s
            step = np.where(np.abs(dg) > 0, g / np.where(dg != 0, dg, 1.0), 0.0)
            t = t - np.clip(step, -0.1, 0.1)
        return np.hypot(a * np.cos(t) - x, b * np.sin(t) - y)

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), scale: float = 1.0) -> "Ellipse":
        center = scale * rotation_matrix(angle) @ np.asarray(self.center) + np.asarray(shift, dtype=float)
        return Ellipse(center=tuple(center),
                       semi_axes=(scale * self.semi_axes[0], scale * self.semi_axes[1]),
                       rotation=self.rotation + angle)


class Polygon(_CurveBase):
    """Simple polygon; stored counterclockwise"""
    kind: Literal["polygon"] = "polygon"
    vertices: List[Tuple[float, float]]

    @field_validator('vertices')
    @classmethod
    def validate_vertices(cls, v):
        pts = np.asarray(v, dtype=float)
        if len(pts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polygon vertices must be finite")
        gaps = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        if np.any(gaps == 0.0):
            raise ValueError("polygon vertices must not repeat")
        area = _signed_area(pts)
        if area == 0.0:
            raise ValueError("polygon is degenerate (zero area)")
        if _self_intersects(pts):
            raise ValueError("polygon must not self-intersect")
        if area < 0:
            pts = pts[::-1]
        return [tuple(p) for p in pts]

    @property
    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def edge_lengths(self) -> np.ndarray:
        v = self.vertex_array
        return np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)

    def perimeter(self) -> float:
        return float(self.edge_lengths().sum())

    def diameter(self) -> float:
        v = self.vertex_array
        return float(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1).max())

    def distance(self, points) -> np.ndarray:
        pts = _as_points(points)
        v = self.vertex_array
        return point_segment_distance(pts[:, None, :], v[None], np.roll(v, -1, axis=0)[None]).min(axis=1)

    def _inside(self, pts: np.ndarray) -> np.ndarray:
        return winding_numbers(pts, self.vertex_array) != 0

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), scale: float = 1.0) -> "Polygon":
        v = scale * self.vertex_array @ rotation_matrix(angle).T + np.asarray(shift, dtype=float)
        return Polygon(vertices=[tuple(p) for p in v])


def _signed_area(pts: np.ndarray) -> float:
    nxt = np.roll(pts, -1, axis=0)
    return 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))


def _self_intersects(pts: np.ndarray) -> bool:
    n = len(pts)
    starts, ends = pts, np.roll(pts, -1, axis=0)
    i, j = np.triu_indices(n, k=2)
    # Edges sharing a vertex (including first/last) are adjacent
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return False
    scale = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
    dist = segment_distance(starts[i], ends[i], starts[j], ends[j])
    return bool(np.any(dist <= 1e-14 * scale))


BoundaryCurve = Annotated[Union[Circle, Ellipse, Polygon], Field(discriminator='kind')]


def unit_square() -> Polygon:
    return Polygon(vertices=[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def classify_points(curve: Classifiable, points) -> List[PointLocation]:
    return curve.classify_points(points)


def classify_point(curve: Classifiable, x) -> PointLocation:
    """Classify a single point against a curve (or a panel mesh)"""
    return curve.classify_points(np.asarray(x, dtype=float).reshape(1, 2))[0]


class QuadratureRule(BaseModel):
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def mapped(self, a, b) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights mapped to [a, b]; a, b may be arrays (one interval per entry)"""
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * self.nodes, half * self.weights


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes, 1 <= n <= 64"""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= GeometryConstants.MAX_GAUSS_NODES:
        raise ConfigurationError(
            f"quadrature order must be an integer in [1, {GeometryConstants.MAX_GAUSS_NODES}], got {n}"
        )
    nodes, weights = np.polynomial.legendre.leggauss(int(n))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


class PanelMesh(BaseModel):
    """
    Closed chain of straight panels approximating a boundary curve.

    Panel i runs from starts[i] to ends[i]; ends[i] == starts[i+1].
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    starts: np.ndarray
    ends: np.ndarray
    parent: Optional[BoundaryCurve] = None
    coarse_index: Optional[np.ndarray] = None

    @model_validator(mode='after')
    def _validate_chain(self) -> "PanelMesh":
        if self.starts.shape != self.ends.shape or self.starts.ndim != 2 or self.starts.shape[1] != 2:
            raise ValueError("panel starts and ends must both have shape (N, 2)")
        if len(self.starts) < 3:
            raise ValueError("a closed panel mesh needs at least 3 panels")
        if np.any(self.lengths <= 0):
            raise ValueError("panels must have positive length")
        return self

    @property
    def size(self) -> int:
        return len(self.starts)

    def __len__(self) -> int:
        return self.size

    @property
    def vertices(self) -> np.ndarray:
        return self.starts

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.starts + self.ends)

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.ends - self.starts, axis=1)

    @property
    def tangents(self) -> np.ndarray:
        return (self.ends - self.starts) / self.lengths[:, None]

    @property
    def normals(self) -> np.ndarray:
        """Outward unit normals for a counterclockwise chain"""
        t = self.tangents
        return np.stack([t[:, 1], -t[:, 0]], axis=1)

    @property
    def perimeter(self) -> float:
        return float(self.lengths.sum())

    @property
    def diameter(self) -> float:
        v = self.starts
        return float(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1).max())

    @property
    def quasi_uniformity(self) -> float:
        return float(self.lengths.min() / self.lengths.max())

    def center(self) -> np.ndarray:
        if self.parent is not None and hasattr(self.parent, 'center'):
            return np.asarray(self.parent.center, dtype=float)
        return self.starts.mean(axis=0)

    def polar_angles(self, center=None) -> np.ndarray:
        """Polar angle of each panel midpoint about center (default: the curve center)"""
        c = self.center() if center is None else np.asarray(center, dtype=float)
        rel = self.midpoints - c
        return np.arctan2(rel[:, 1], rel[:, 0])

    def distance(self, points) -> np.ndarray:
        pts = _as_points(points)
        return point_segment_distance(pts[:, None, :], self.starts[None], self.ends[None]).min(axis=1)

    def classify_points(self, points) -> List[PointLocation]:
        """Classify points against the panel polygon itself"""
        pts = _as_points(points)
        tolerance = GeometryConstants.BOUNDARY_TOLERANCE * self.diameter
        return _classify_polygonal(pts, self.starts, tolerance)

    def refined(self, k: int) -> "PanelMesh":
        """Split every panel into k equal collinear subpanels"""
        if k < 1:
            raise ConfigurationError(f"refinement factor must be >= 1, got {k}")
        frac = np.arange(k) / k
        starts = self.starts[:, None, :] + frac[None, :, None] * (self.ends - self.starts)[:, None, :]
        ends = np.concatenate([starts[:, 1:, :], self.ends[:, None, :]], axis=1)
        return PanelMesh(starts=starts.reshape(-1, 2), ends=ends.reshape(-1, 2), parent=self.parent,
                         coarse_index=np.repeat(np.arange(self.size), k))

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), scale: float = 1.0) -> "PanelMesh":
        rot = rotation_matrix(angle)
        shift = np.asarray(shift, dtype=float)
        parent = self.parent.transformed(angle, shift, scale) if self.parent is not None else None
        return PanelMesh(starts=scale * self.starts @ rot.T + shift, ends=scale * self.ends @ rot.T + shift,
                         parent=parent, coarse_index=self.coarse_index)


def discretize(curve, n_panels: int) -> PanelMesh:
    """
    Partition a boundary curve into straight panels.

    Circle and ellipse panels join points at equispaced parameters on the
    curve. Polygon edges receive panels in proportion to their length,
    each edge at least one, and are split into equal pieces.

    Raises:
        ConfigurationError: Too few panels or a mesh that is not quasi-uniform
    """
    if n_panels < 3:
        raise ConfigurationError(f"at least 3 panels required, got {n_panels}")

    if isinstance(curve, Polygon):
        points = _polygon_panel_points(curve, n_panels)
    else:
        t = 2.0 * math.pi * np.arange(n_panels) / n_panels
        points = curve.point_at(t)

    mesh = PanelMesh(starts=points, ends=np.roll(points, -1, axis=0), parent=curve)
    if mesh.quasi_uniformity < GeometryConstants.MIN_QUASI_UNIFORMITY:
        raise ConfigurationError(
            f"mesh is not quasi-uniform: min/max panel length {mesh.quasi_uniformity:.3g} "
            f"< {GeometryConstants.MIN_QUASI_UNIFORMITY}"
        )
    logger.debug(f"Discretized {curve.kind} into {n_panels} panels (h_max={mesh.lengths.max():.4g})")
    return mesh


def _polygon_panel_points(polygon: Polygon, n_panels: int) -> np.ndarray:
    vertices = polygon.vertex_array
    n_edges = len(vertices)
    if n_panels < n_edges:
        raise ConfigurationError(f"polygon with {n_edges} edges needs at least {n_edges} panels, got {n_panels}")
    lengths = polygon.edge_lengths()
    counts = np.ones(n_edges, dtype=int)
    for _ in range(n_panels - n_edges):
        counts[np.argmax(lengths / counts)] += 1

    nxt = np.roll(vertices, -1, axis=0)
    pieces = []
    for e in range(n_edges):
        frac = np.arange(counts[e]) / counts[e]
        pieces.append(vertices[e] + frac[:, None] * (nxt[e] - vertices[e]))
    return np.concatenate(pieces, axis=0)
