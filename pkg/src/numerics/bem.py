"""
Piecewise-constant Galerkin discretization of the single-layer Riesz operator.
Follows SRP - assembly, solution and evaluation of the boundary density;
geometry and special functions come from their own modules.
"""
import logging
import time
from typing import Callable, Literal, Optional, Tuple, Union

import humanize
import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import (AssemblyError, ConfigurationError, DataError, EvaluationError,
                     SingularityError, SolverError)
from .geometry import (GeometryConstants, PanelMesh, QuadratureRule, gauss_rule, point_segment_distance,
                       segment_distance)
from .interfaces import PointFunction
from .quadrature import collinear_pair_integral, corner_pair_integral, segment_potential
from .specfun import FracOrder, riesz_constant

logger = logging.getLogger(__name__)


class AssemblyConstants:
    """Accuracy targets of the Galerkin assembly and solve"""
    NEAR_RELATIVE_TOLERANCE: float = 1e-10
    NEAR_MAX_LEVELS: int = 20
    SYMMETRY_TOLERANCE: float = 1e-8
    COLLINEAR_TOLERANCE: float = 1e-12
    SOLVER_TARGET: float = 1e-10
    DEFAULT_QUAD_ORDER: int = 8
    DEFAULT_CHUNK: int = 64
    EVALUATION_PAIR_BUDGET: int = 1 << 18  # point-panel pairs per evaluation batch


class SingleLayerMatrix(BaseModel):
    """Symmetric Galerkin matrix A[i, j] = int_Gi int_Gj phi(x - y) ds(y) ds(x)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray
    mesh: PanelMesh
    order: FracOrder
    symmetry_defect: float = 0.0

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def cholesky_ok(self) -> bool:
        try:
            scipy.linalg.cho_factor(self.entries)
            return True
        except scipy.linalg.LinAlgError:
            return False

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.entries)

    def normalized_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of D^-1/2 A D^-1/2 with D the panel lengths"""
        scale = 1.0 / np.sqrt(self.mesh.lengths)
        return scipy.linalg.eigvalsh(self.entries * scale[:, None] * scale[None, :])

    def condition_estimate(self) -> float:
        eig = self.eigenvalues()
        if eig[0] <= 0:
            return float('inf')
        return float(eig[-1] / eig[0])

    def energy(self, density, rhs) -> float:
        """Quadratic functional 1/2 <A G, G> - <b, G> minimized by the Galerkin solution"""
        g = density.coeffs if isinstance(density, BoundaryDensity) else np.asarray(density, dtype=float)
        b = rhs.loads() if isinstance(rhs, TraceData) else np.asarray(rhs, dtype=float)
        return float(0.5 * g @ (self.entries @ g) - b @ g)

    def __matmul__(self, other):
        if isinstance(other, BoundaryDensity):
            return self.entries @ other.coeffs
        return self.entries @ np.asarray(other)


class BoundaryDensity(BaseModel):
    """Piecewise-constant single-layer density, one coefficient per panel"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: np.ndarray
    mesh: PanelMesh
    factorization: Literal["cholesky", "lu", "none"] = "cholesky"
    relative_residual: float = 0.0

    @model_validator(mode='after')
    def _validate_coeffs(self) -> "BoundaryDensity":
        if self.coeffs.shape != (self.mesh.size,):
            raise ValueError(f"density needs {self.mesh.size} coefficients, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("density coefficients must be finite")
        return self

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) * self.mesh.lengths))

    def total_mass(self) -> float:
        return float(np.sum(self.coeffs * self.mesh.lengths))

    def _with(self, coeffs: np.ndarray) -> "BoundaryDensity":
        return BoundaryDensity(coeffs=coeffs, mesh=self.mesh, factorization="none")

    def __add__(self, other: "BoundaryDensity") -> "BoundaryDensity":
        if other.mesh.size != self.mesh.size:
            raise ConfigurationError("densities live on different meshes")
        return self._with(self.coeffs + other.coeffs)

    def __sub__(self, other: "BoundaryDensity") -> "BoundaryDensity":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "BoundaryDensity":
        return self._with(float(scalar) * self.coeffs)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, mesh: PanelMesh) -> "BoundaryDensity":
        return cls(coeffs=np.zeros(mesh.size), mesh=mesh, factorization="none")


class TraceData(BaseModel):
    """
    Dirichlet data per panel.

    kind "load" holds the integrals int_Gi g ds (the Galerkin right-hand
    side), kind "average" the panel means of g.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    mesh: PanelMesh
    kind: Literal["load", "average"] = "average"

    @model_validator(mode='after')
    def _validate_values(self) -> "TraceData":
        if self.values.shape != (self.mesh.size,):
            raise ValueError(f"trace needs {self.mesh.size} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trace values must be finite")
        return self

    def loads(self) -> np.ndarray:
        return self.values if self.kind == "load" else self.values * self.mesh.lengths

    def averages(self) -> np.ndarray:
        return self.values if self.kind == "average" else self.values / self.mesh.lengths


def _require_planar(order: FracOrder) -> None:
    if order.d != 2:
        raise ConfigurationError(f"boundary elements are implemented for d=2 only, got d={order.d}")


def _segment_integral(x: np.ndarray, start: np.ndarray, end: np.ndarray, p: float) -> np.ndarray:
    """
    int_[start, end] |x - y|^p ds(y), exact through the segment potential.

    Broadcasts over leading axes of x, start and end.
    """
    edge = end - start
    length = np.linalg.norm(edge, axis=-1)
    tangent = edge / length[..., None]
    rel = x - start
    u0 = np.sum(rel * tangent, axis=-1)
    h = np.abs(rel[..., 0] * tangent[..., 1] - rel[..., 1] * tangent[..., 0])
    h = np.where(h <= AssemblyConstants.COLLINEAR_TOLERANCE * length, 0.0, h)
    return segment_potential(h, length - u0, p) - segment_potential(h, -u0, p)


def panel_inner_integral(order: FracOrder, panel, x, quad: Optional[QuadratureRule] = None,
                         self_panel: bool = False):
    """
    Integral of the Riesz kernel over one panel, seen from x.

    Args:
        order: Dimension and order (d = 2)
        panel: (start, end) pair of points
        x: Evaluation point, or array of points (M, 2)
        quad: Gauss rule for far points (default 8 nodes)
        self_panel: Allow x inside the panel (weakly singular but integrable)

    Returns:
        int_panel phi(x - y) ds(y)

    Raises:
        SingularityError: x inside the open panel and self_panel is False
    """
    _require_planar(order)
    quad = quad or gauss_rule(AssemblyConstants.DEFAULT_QUAD_ORDER)
    start, end = (np.asarray(v, dtype=float) for v in panel)
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 1
    pts = pts.reshape(-1, 2)

    edge = end - start
    length = float(np.linalg.norm(edge))
    tangent = edge / length
    rel = pts - start
    u0 = rel @ tangent
    h = np.abs(rel[:, 0] * tangent[1] - rel[:, 1] * tangent[0])
    on_line = h <= AssemblyConstants.COLLINEAR_TOLERANCE * length
    inside = on_line & (u0 > 0.0) & (u0 < length)
    if np.any(inside) and not self_panel:
        raise SingularityError(f"evaluation point {pts[np.argmax(inside)].tolist()} lies inside the panel")

    dist = np.where(u0 < 0, np.hypot(u0, h), np.where(u0 > length, np.hypot(u0 - length, h), h))
    near = dist < length
    result = np.empty(len(pts))
    p = order.kernel_exponent
    if np.any(near):
        result[near] = _segment_integral(pts[near], start, end, p)
    if np.any(~near):
        nodes, weights = quad.mapped(0.0, length)
        y = start + nodes[:, None] * tangent
        r = np.linalg.norm(pts[~near][:, None, :] - y[None, :, :], axis=-1)
        result[~near] = (r ** p) @ weights
    result *= riesz_constant(order)
    return float(result[0]) if scalar else result


def _classify_pairs(mesh: PanelMesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Masks for collinear, corner and near pairs (far = everything else)"""
    n = mesh.size
    lengths = mesh.lengths
    starts, ends, tangents = mesh.starts, mesh.ends, mesh.tangents
    scale = np.maximum(lengths[:, None], lengths[None, :])

    def off_line(points):
        rel = points[None, :, :] - starts[:, None, :]
        return np.abs(tangents[:, None, 0] * rel[..., 1] - tangents[:, None, 1] * rel[..., 0])

    tol = AssemblyConstants.COLLINEAR_TOLERANCE * scale
    collinear = (off_line(starts) <= tol) & (off_line(ends) <= tol)
    collinear = collinear & collinear.T

    dist = segment_distance(starts[:, None, :], ends[:, None, :], starts[None, :, :], ends[None, :, :])
    dist = np.minimum(dist, dist.T)

    idx = np.arange(n)
    adjacent = np.zeros((n, n), dtype=bool)
    adjacent[idx, (idx + 1) % n] = True
    adjacent[idx, (idx - 1) % n] = True

    near = dist < scale
    collinear_exact = collinear & (near | adjacent)
    np.fill_diagonal(collinear_exact, True)
    corner = adjacent & ~collinear_exact
    near_other = near & ~collinear_exact & ~corner
    return collinear_exact, corner, near_other, dist


def _collinear_entries(mesh: PanelMesh, rows: np.ndarray, cols: np.ndarray, p: float) -> np.ndarray:
    origin = mesh.starts[rows]
    tangent = mesh.tangents[rows]
    a = np.sum((mesh.starts[cols] - origin) * tangent, axis=1)
    b = np.sum((mesh.ends[cols] - origin) * tangent, axis=1)
    low, high = np.minimum(a, b), np.maximum(a, b)
    return collinear_pair_integral(0.0, mesh.lengths[rows], low, high, p)


def _corner_entries(mesh: PanelMesh, rows: np.ndarray, cols: np.ndarray, p: float) -> np.ndarray:
    n = mesh.size
    follows = cols == (rows + 1) % n
    # Shared vertex is end(i) = start(j) when j follows i, else start(i) = end(j)
    vertex = np.where(follows[:, None], mesh.ends[rows], mesh.starts[rows])
    far_i = np.where(follows[:, None], mesh.starts[rows], mesh.ends[rows])
    far_j = np.where(follows[:, None], mesh.ends[cols], mesh.starts[cols])
    len_i, len_j = mesh.lengths[rows], mesh.lengths[cols]
    e1 = (far_i - vertex) / len_i[:, None]
    e2 = (far_j - vertex) / len_j[:, None]
    cos_g = np.clip(np.sum(e1 * e2, axis=1), -1.0, 1.0)
    sin_g = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return corner_pair_integral(len_i, len_j, cos_g, sin_g, p)


def _near_entries(mesh: PanelMesh, rows: np.ndarray, cols: np.ndarray, rule: QuadratureRule,
                  p: float) -> np.ndarray:
    """
    Outer Gauss over panel i with adaptive dyadic bisection, exact inner
    integral over panel j. All pairs advance one level at a time.
    """
    if len(rows) == 0:
        return np.zeros(0)

    def estimate(pair, a, b):
        i, j = rows[pair], cols[pair]
        frac, w = rule.mapped(a, b)
        x = mesh.starts[i][:, None, :] + frac[..., None] * (mesh.ends[i] - mesh.starts[i])[:, None, :]
        inner = _segment_integral(x, mesh.starts[j][:, None, :], mesh.ends[j][:, None, :], p)
        return np.sum(w * inner, axis=1) * mesh.lengths[i]

    pair = np.arange(len(rows))
    a = np.zeros(len(rows))
    b = np.ones(len(rows))
    whole = estimate(pair, a, b)
    scale = np.abs(whole)
    result = np.zeros(len(rows))
    deepest = 0

    for level in range(AssemblyConstants.NEAR_MAX_LEVELS + 1):
        mid = 0.5 * (a + b)
        left = estimate(pair, a, mid)
        right = estimate(pair, mid, b)
        refined = left + right
        tol = AssemblyConstants.NEAR_RELATIVE_TOLERANCE * scale[pair] * (b - a)
        done = np.abs(refined - whole) <= tol
        np.add.at(result, pair[done], refined[done])
        deepest = level
        if np.all(done):
            break
        keep = ~done
        pair = np.concatenate([pair[keep], pair[keep]])
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    else:
        bad = int(pair[0])
        raise AssemblyError(
            f"near-singular pair ({rows[bad]}, {cols[bad]}) did not converge in "
            f"{AssemblyConstants.NEAR_MAX_LEVELS} bisection levels",
            pair=(int(rows[bad]), int(cols[bad])),
        )

    logger.debug(f"Near-field: {len(rows)} ordered pairs, deepest bisection level {deepest}")
    return result


def _far_entries(mesh: PanelMesh, rule: QuadratureRule, p: float, chunk_size: int) -> np.ndarray:
    """Tensor Gauss for every pair, in row chunks; near entries get overwritten"""
    n = mesh.size
    nodes, weights = rule.mapped(np.zeros(n), mesh.lengths)
    points = mesh.starts[:, None, :] + nodes[..., None] * mesh.tangents[:, None, :]
    out = np.empty((n, n))
    for lo in range(0, n, chunk_size):
        hi = min(n, lo + chunk_size)
        diff = points[lo:hi, None, :, None, :] - points[None, :, None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        with np.errstate(divide='ignore'):
            kernel = np.where(r > 0, r, np.inf) ** p
        out[lo:hi] = np.einsum('ia,ijab,jb->ij', weights[lo:hi], kernel, weights)
    return out


def assemble_galerkin(mesh: PanelMesh, order: FracOrder, quad: Optional[QuadratureRule] = None,
                      chunk_size: int = AssemblyConstants.DEFAULT_CHUNK) -> SingleLayerMatrix:
    """
    Assemble the single-layer Galerkin matrix.

    Collinear near pairs (the diagonal included) use the closed form,
    adjacent panels meeting at an angle use the corner reduction, other
    pairs closer than a panel length use adaptive outer quadrature with an
    exact inner integral, and the rest use tensor Gauss. Every ordered pair
    is computed on its own so the symmetry defect is a real accuracy check.

    Args:
        mesh: Closed panel mesh with at least 3 panels
        order: Dimension (2) and fractional order
        quad: Gauss rule for far and near outer integrals (default 8 nodes)
        chunk_size: Rows per far-field batch; affects memory only

    Returns:
        SingleLayerMatrix after symmetrization

    Raises:
        AssemblyError: A near pair failed to converge or the symmetry defect is too large
    """
    _require_planar(order)
    if mesh.size < 3:
        raise ConfigurationError(f"at least 3 panels required, got {mesh.size}")
    rule = quad or gauss_rule(AssemblyConstants.DEFAULT_QUAD_ORDER)
    p = order.kernel_exponent
    started = time.monotonic()

    collinear, corner, near, _ = _classify_pairs(mesh)
    entries = _far_entries(mesh, rule, p, max(1, int(chunk_size)))

    rows, cols = np.nonzero(collinear)
    entries[rows, cols] = _collinear_entries(mesh, rows, cols, p)
    rows, cols = np.nonzero(corner)
    entries[rows, cols] = _corner_entries(mesh, rows, cols, p)
    rows, cols = np.nonzero(near)
    entries[rows, cols] = _near_entries(mesh, rows, cols, rule, p)

    entries *= riesz_constant(order)
    if not np.all(np.isfinite(entries)):
        bad = np.argwhere(~np.isfinite(entries))[0]
        raise AssemblyError(f"non-finite matrix entry at pair ({bad[0]}, {bad[1]})", pair=tuple(int(v) for v in bad))

    skew = np.abs(entries - entries.T)
    defect = float(skew.max())
    limit = AssemblyConstants.SYMMETRY_TOLERANCE * float(np.abs(entries).max())
    if defect > limit:
        i, j = np.unravel_index(np.argmax(skew), skew.shape)
        raise AssemblyError(
            f"symmetry defect {defect:.3e} exceeds {limit:.3e} at pair ({i}, {j})", pair=(int(i), int(j))
        )
    entries = 0.5 * (entries + entries.T)

    elapsed = time.monotonic() - started
    logger.info(
        f"Assembled {mesh.size}x{mesh.size} single-layer matrix ({order}) in "
        f"{humanize.naturaldelta(elapsed, minimum_unit='milliseconds')}: "
        f"{int(collinear.sum())} collinear, {int(corner.sum())} corner, {int(near.sum())} near pairs, "
        f"symmetry defect {defect:.2e}"
    )
    return SingleLayerMatrix(entries=entries, mesh=mesh, order=order, symmetry_defect=defect)


def assemble_rhs(g: PointFunction, mesh: PanelMesh,
                 quad: Optional[QuadratureRule] = None) -> TraceData:
    """
    Load vector b[i] = int_Gi g ds.

    Raises:
        DataError: g is not finite at a quadrature node
    """
    rule = quad or gauss_rule(AssemblyConstants.DEFAULT_QUAD_ORDER)
    nodes, weights = rule.mapped(np.zeros(mesh.size), mesh.lengths)
    points = mesh.starts[:, None, :] + nodes[..., None] * mesh.tangents[:, None, :]
    values = np.broadcast_to(np.asarray(g(points.reshape(-1, 2)), dtype=float), (nodes.size,)).reshape(nodes.shape)
    if not np.all(np.isfinite(values)):
        raise DataError("boundary data is not finite at a quadrature node")
    return TraceData(values=np.sum(values * weights, axis=1), mesh=mesh, kind="load")


def _factorize(a: np.ndarray) -> Tuple[str, Callable[[np.ndarray], np.ndarray]]:
    try:
        factor = scipy.linalg.cho_factor(a)
    except scipy.linalg.LinAlgError:
        logger.warning("Cholesky factorization failed; falling back to pivoted LU")
    else:
        return "cholesky", lambda v: scipy.linalg.cho_solve(factor, v)

    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or pivots.min() <= np.finfo(float).eps * len(a) * np.abs(a).max():
        raise SolverError("single-layer matrix is singular")
    return "lu", lambda v: scipy.linalg.lu_solve((lu, piv), v)


def solve_density(matrix: SingleLayerMatrix, rhs: Union[TraceData, np.ndarray]) -> BoundaryDensity:
    """
    Solve A G = b.

    Cholesky first; a failed Cholesky falls back to pivoted LU with a
    warning. One step of iterative refinement when the residual misses
    the target. A raw array is taken as the load vector itself.

    Raises:
        DataError: Non-finite right-hand side
        SolverError: The system is singular
    """
    b = rhs.loads() if isinstance(rhs, TraceData) else np.asarray(rhs, dtype=float)
    if b.shape != (matrix.size,):
        raise ConfigurationError(f"right-hand side needs {matrix.size} entries, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise DataError("right-hand side is not finite")
    a = matrix.entries

    factorization, solve = _factorize(a)

    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return BoundaryDensity(coeffs=np.zeros_like(b), mesh=matrix.mesh, factorization=factorization)

    g = solve(b)
    residual = float(np.linalg.norm(a @ g - b)) / norm_b
    if residual > AssemblyConstants.SOLVER_TARGET:
        g = g + solve(b - a @ g)
        residual = float(np.linalg.norm(a @ g - b)) / norm_b
        if residual > AssemblyConstants.SOLVER_TARGET:
            logger.warning(f"Solver residual {residual:.2e} above target {AssemblyConstants.SOLVER_TARGET:.0e}")
    if not np.all(np.isfinite(g)):
        raise SolverError("solution is not finite")

    logger.info(f"Solved {matrix.size} unknowns by {factorization}, relative residual {residual:.2e}")
    return BoundaryDensity(coeffs=g, mesh=matrix.mesh, factorization=factorization, relative_residual=residual)


def single_layer_values(density: BoundaryDensity, order: FracOrder, points: np.ndarray,
                        quad: Optional[QuadratureRule] = None) -> np.ndarray:
    """Single-layer potential without the boundary check (continuous across the boundary)"""
    rule = quad or gauss_rule(AssemblyConstants.DEFAULT_QUAD_ORDER)
    mesh = density.mesh
    p = order.kernel_exponent
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    active = np.flatnonzero(density.coeffs != 0.0)
    out = np.zeros(len(pts))
    if len(active) == 0:
        return out

    starts, ends = mesh.starts[active], mesh.ends[active]
    lengths, coeffs = mesh.lengths[active], density.coeffs[active]
    nodes, weights = rule.mapped(np.zeros(len(active)), lengths)
    quad_points = starts[:, None, :] + nodes[..., None] * mesh.tangents[active][:, None, :]

    rows = max(1, AssemblyConstants.EVALUATION_PAIR_BUDGET // len(active))
    for lo in range(0, len(pts), rows):
        chunk = pts[lo:lo + rows]
        dist = point_segment_distance(chunk[:, None, :], starts[None], ends[None])
        near = dist < lengths[None, :]
        r = np.linalg.norm(chunk[:, None, None, :] - quad_points[None], axis=-1)
        with np.errstate(divide='ignore'):
            values = np.sum(np.where(r > 0, r, np.inf) ** p * weights[None], axis=-1)
        if np.any(near):
            pi, pj = np.nonzero(near)
            values[pi, pj] = _segment_integral(chunk[pi], starts[pj], ends[pj], p)
        out[lo:lo + len(chunk)] = values @ coeffs
    return riesz_constant(order) * out


def eval_single_layer(density: BoundaryDensity, order: FracOrder, points,
                      quad: Optional[QuadratureRule] = None) -> np.ndarray:
    """
    Single-layer potential u(x) = sum_j G_j int_Gj phi(x - y) ds(y) off the boundary.

    Raises:
        EvaluationError: A point lies on the panel polygon
    """
    _require_planar(order)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise DataError("evaluation points must be finite")
    mesh = density.mesh
    on_boundary = mesh.distance(pts) < GeometryConstants.BOUNDARY_TOLERANCE * mesh.diameter
    if np.any(on_boundary):
        bad = pts[on_boundary]
        raise EvaluationError(f"evaluation point(s) on the boundary: {bad[:5].tolist()}", points=bad)
    return single_layer_values(density, order, pts, quad)


def eval_trace(density: BoundaryDensity, order: FracOrder, mesh: Optional[PanelMesh] = None,
               matrix: Optional[SingleLayerMatrix] = None) -> TraceData:
    """Panel averages of the potential on the boundary, (A G)_i / |G_i|"""
    mesh = mesh or density.mesh
    matrix = matrix or assemble_galerkin(mesh, order)
    return TraceData(values=(matrix.entries @ density.coeffs) / mesh.lengths, mesh=mesh)


def project_density(density_fn: PointFunction, mesh: PanelMesh) -> BoundaryDensity:
    """Piecewise-constant density sampled at panel midpoints"""
    values = np.broadcast_to(np.asarray(density_fn(mesh.midpoints), dtype=float), (mesh.size,)).copy()
    if not np.all(np.isfinite(values)):
        raise DataError("density function must return one finite value per panel")
    return BoundaryDensity(coeffs=values, mesh=mesh, factorization="none")


def manufactured_rhs(density_fn: PointFunction, mesh: PanelMesh, order: FracOrder,
                     quad: Optional[QuadratureRule] = None, refinement: int = 4,
                     chunk_size: int = AssemblyConstants.DEFAULT_CHUNK) -> TraceData:
    """
    Load vector of the trace of a known density's potential.

    The density is sampled on a nested mesh with `refinement` subpanels per
    panel; the fine Galerkin products are summed back onto the coarse panels.
    """
    fine = mesh.refined(refinement)
    fine_matrix = assemble_galerkin(fine, order, quad, chunk_size=chunk_size)
    fine_density = project_density(density_fn, fine)
    fine_rhs = fine_matrix.entries @ fine_density.coeffs
    loads = np.bincount(fine.coarse_index, weights=fine_rhs, minlength=mesh.size)
    return TraceData(values=loads, mesh=mesh, kind="load")


def density_error(density: BoundaryDensity, density_fn: PointFunction) -> float:
    """Relative discrete L2 error against a reference density at the midpoints"""
    reference = project_density(density_fn, density.mesh).coeffs
    weights = density.mesh.lengths
    norm_ref = np.sqrt(np.sum(weights * reference ** 2))
    diff = np.sqrt(np.sum(weights * (density.coeffs - reference) ** 2))
    return float(diff / norm_ref) if norm_ref > 0 else float(diff)
