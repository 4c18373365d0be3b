"""
Spectral fractional powers of the Dirichlet Laplacian on axis-aligned rectangles.

Functions are represented by sine coefficients against the orthonormal
eigenbasis (2 / sqrt(ab)) sin(m pi x / a) sin(n pi y / b).
"""
import logging
import math
from typing import Iterable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ConfigurationError, DataError, DomainError
from .geometry import GeometryConstants, gauss_rule
from .interfaces import PointFunction
from .specfun import FracOrder

logger = logging.getLogger(__name__)


class SpectralConstants:
    MIN_NODES: int = 32
    DEFAULT_OVERSAMPLING: int = 4


class SineSeries(BaseModel):
    """M x M sine coefficients on the rectangle [0, width] x [0, height]"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: np.ndarray
    width: float = Field(default=1.0, gt=0)
    height: float = Field(default=1.0, gt=0)

    @model_validator(mode='after')
    def _validate_coeffs(self) -> "SineSeries":
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != self.coeffs.shape[1]:
            raise ValueError(f"sine coefficients must be square, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("sine coefficients must be finite")
        return self

    @property
    def modes(self) -> int:
        return self.coeffs.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def with_coeffs(self, coeffs: np.ndarray) -> "SineSeries":
        return SineSeries(coeffs=coeffs, width=self.width, height=self.height)


def eigenvalues(series: SineSeries) -> np.ndarray:
    """Dirichlet eigenvalues pi^2 (m^2 / a^2 + n^2 / b^2), m, n = 1..M"""
    k = np.arange(1, series.modes + 1, dtype=float)
    return math.pi ** 2 * ((k[:, None] / series.width) ** 2 + (k[None, :] / series.height) ** 2)


def _axis_rule(length: float, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [0, length] split into panels of at most 64 nodes"""
    panels = max(1, math.ceil(n_nodes / GeometryConstants.MAX_GAUSS_NODES))
    per_panel = math.ceil(n_nodes / panels)
    edges = np.linspace(0.0, length, panels + 1)
    nodes, weights = gauss_rule(per_panel).mapped(edges[:-1], edges[1:])
    return nodes.ravel(), weights.ravel()


def _sine_matrix(modes: int, coords: np.ndarray, length: float) -> np.ndarray:
    k = np.arange(1, modes + 1, dtype=float)
    return np.sin(math.pi * k[:, None] * coords[None, :] / length)


def project(f: PointFunction, M: int, q: int = SpectralConstants.DEFAULT_OVERSAMPLING,
            width: float = 1.0, height: float = 1.0) -> SineSeries:
    """
    Sine coefficients of f by tensor Gauss-Legendre quadrature.

    Args:
        f: Function of points (K, 2)
        M: Modes per direction
        q: Oversampling; max(q M, 32) nodes per direction

    Raises:
        DataError: f is not finite at a node
    """
    if M < 1:
        raise ConfigurationError(f"spectral order must be >= 1, got {M}")
    if q < 1:
        raise ConfigurationError(f"spectral oversampling must be >= 1, got {q}")
    n_nodes = max(q * M, SpectralConstants.MIN_NODES)
    x, wx = _axis_rule(width, n_nodes)
    y, wy = _axis_rule(height, n_nodes)
    grid = np.stack(np.meshgrid(x, y, indexing='ij'), axis=-1).reshape(-1, 2)
    values = np.broadcast_to(np.asarray(f(grid), dtype=float), (len(grid),)).reshape(len(x), len(y))
    if not np.all(np.isfinite(values)):
        raise DataError("volume data is not finite at a quadrature node")

    sx = _sine_matrix(M, x, width) * wx[None, :]
    sy = _sine_matrix(M, y, height) * wy[None, :]
    coeffs = 2.0 / math.sqrt(width * height) * sx @ values @ sy.T
    logger.debug(f"Projected volume data onto {M}x{M} modes with {len(x)}x{len(y)} nodes")
    return SineSeries(coeffs=coeffs, width=width, height=height)


def _check_order(order: FracOrder) -> None:
    if order.d != 2:
        raise ConfigurationError(f"spectral solver works on planar rectangles, got d={order.d}")


def apply_inverse_frac(series: SineSeries, order: FracOrder) -> SineSeries:
    """u1 = -(-Delta_D)^(-alpha) f, i.e. c' = -lambda^(-alpha) c"""
    _check_order(order)
    return series.with_coeffs(-series.coeffs * eigenvalues(series) ** (-order.alpha))


def apply_forward_frac(series: SineSeries, order: FracOrder) -> SineSeries:
    """(-Delta_D)^alpha u, i.e. c' = lambda^alpha c"""
    _check_order(order)
    return series.with_coeffs(series.coeffs * eigenvalues(series) ** order.alpha)


def eval_series(series: SineSeries, points) -> np.ndarray:
    """
    Point values of a sine series.

    Raises:
        DomainError: A point lies outside the closed rectangle
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    outside = (x < 0) | (x > series.width) | (y < 0) | (y > series.height)
    if np.any(outside):
        raise DomainError(f"point(s) outside the rectangle: {pts[outside][:5].tolist()}")
    sx = _sine_matrix(series.modes, x, series.width)
    sy = _sine_matrix(series.modes, y, series.height)
    values = 2.0 / math.sqrt(series.width * series.height) * np.einsum('mk,mn,nk->k', sx, series.coeffs, sy)
    on_edge = (x == 0) | (x == series.width) | (y == 0) | (y == series.height)
    values[on_edge] = 0.0
    return values


def mode_sum(modes: Iterable[Tuple[int, int, float]], M: int, width: float = 1.0,
             height: float = 1.0) -> SineSeries:
    """
    Series of f = sum amplitude * sin(m pi x / a) sin(n pi y / b).

    Amplitudes refer to the plain sine products, not the normalized basis.
    """
    coeffs = np.zeros((M, M))
    scale = 0.5 * math.sqrt(width * height)
    for m, n, amplitude in modes:
        if not (1 <= m <= M and 1 <= n <= M):
            raise ConfigurationError(f"mode ({m}, {n}) outside 1..{M}")
        coeffs[m - 1, n - 1] += scale * amplitude
    return SineSeries(coeffs=coeffs, width=width, height=height)


def mode_function(modes: Iterable[Tuple[int, int, float]], width: float = 1.0,
                  height: float = 1.0) -> PointFunction:
    """Point function of a finite sum of sine products"""
    modes = list(modes)

    def f(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        total = np.zeros(len(pts))
        for m, n, amplitude in modes:
            total += amplitude * np.sin(m * math.pi * pts[:, 0] / width) * np.sin(n * math.pi * pts[:, 1] / height)
        return total

    return f


def solve_volume(f: PointFunction, order: FracOrder, M: int,
                 q: int = SpectralConstants.DEFAULT_OVERSAMPLING, width: float = 1.0,
                 height: float = 1.0) -> SineSeries:
    """Spectral part u1 of the solution: project f, then apply the inverse power"""
    return apply_inverse_frac(project(f, M, q, width, height), order)
