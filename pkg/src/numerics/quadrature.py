"""
Closed forms and rule builders for the weakly singular kernel |r|^p.

Shared by the Galerkin assembly and the verification oracle. All routines
work on arrays and broadcast their arguments.
"""
import math
from typing import Tuple

import numpy as np

from .errors import DomainError
from .geometry import gauss_rule


class SegmentPotentialConstants:
    """Fixed rule for the sinh-regularized segment integral"""
    PIECES: int = 25
    NODES_PER_PIECE: int = 10
    # cosh(t) equals e^t / 2 to double precision past this point
    TAIL_START: float = 20.0
    CHUNK: int = 20000


def segment_potential(h, u, p: float) -> np.ndarray:
    """
    Odd antiderivative of the kernel along a line at distance h.

    F(u) = sign(u) * int_0^|u| (h^2 + s^2)^(p/2) ds for -1 < p <= 0, h >= 0.
    For h > 0 the substitution s = h sinh(t) gives the smooth integral
    h^(p+1) int_0^asinh(|u|/h) cosh(t)^(p+1) dt.

    Args:
        h: Distance(s) from the line, >= 0
        u: Signed arc-length coordinate(s)
        p: Kernel exponent

    Returns:
        F values with the broadcast shape of h and u
    """
    if not -1.0 < p <= 0.0:
        raise DomainError(f"segment_potential requires -1 < p <= 0, got {p}")
    h, u = np.broadcast_arrays(np.asarray(h, dtype=float), np.asarray(u, dtype=float))
    if np.any(h < 0):
        raise DomainError("segment_potential requires h >= 0")
    w = np.abs(u).ravel()
    hf = h.ravel()
    q = p + 1.0
    out = np.zeros_like(w)

    on_line = (hf == 0.0) & (w > 0.0)
    out[on_line] = w[on_line] ** q / q

    off = np.flatnonzero((hf > 0.0) & (w > 0.0))
    for start in range(0, len(off), SegmentPotentialConstants.CHUNK):
        idx = off[start:start + SegmentPotentialConstants.CHUNK]
        out[idx] = _regularized(hf[idx], w[idx], q)

    return (np.sign(u).ravel() * out).reshape(u.shape)


def _regularized(h: np.ndarray, w: np.ndarray, q: float) -> np.ndarray:
    total_t = np.arcsinh(w / h)
    body_t = np.minimum(total_t, SegmentPotentialConstants.TAIL_START)

    rule = gauss_rule(SegmentPotentialConstants.NODES_PER_PIECE)
    pieces = SegmentPotentialConstants.PIECES
    edges = np.linspace(0.0, 1.0, pieces + 1)
    unit_nodes, unit_weights = rule.mapped(edges[:-1], edges[1:])
    unit_nodes, unit_weights = unit_nodes.ravel(), unit_weights.ravel()

    t = body_t[:, None] * unit_nodes[None, :]
    body = body_t * (np.cosh(t) ** q @ unit_weights)

    # Tail: cosh(t)^q = (e^t / 2)^q beyond TAIL_START
    tail = np.zeros_like(body)
    beyond = total_t > SegmentPotentialConstants.TAIL_START
    if np.any(beyond):
        shift = np.log(h[beyond]) - math.log(2.0)
        tail[beyond] = (np.exp(q * (shift + total_t[beyond]))
                        - np.exp(q * (shift + SegmentPotentialConstants.TAIL_START))) / q
    return h ** q * body + tail


def _antiderivative_h(u: np.ndarray, p: float) -> np.ndarray:
    return np.abs(u) ** (p + 2.0) / ((p + 1.0) * (p + 2.0))


def collinear_pair_integral(a, b, c, d, p: float) -> np.ndarray:
    """
    int_a^b int_c^d |t - s|^p dt ds for intervals on a common line.

    Exact for any relative position, including overlap and identity.
    """
    a, b, c, d = (np.asarray(v, dtype=float) for v in (a, b, c, d))
    return (_antiderivative_h(d - a, p) - _antiderivative_h(d - b, p)
            - _antiderivative_h(c - a, p) + _antiderivative_h(c - b, p))


def corner_pair_integral(length_1, length_2, cos_gamma, sin_gamma, p: float) -> np.ndarray:
    """
    int_0^L1 int_0^L2 |s e1 - t e2|^p dt ds for segments leaving a common vertex.

    The rectangle is cut along its diagonal; on each triangle the kernel is
    homogeneous, so the inner variable scales out and the remaining integral
    is a segment potential.

    Args:
        length_1, length_2: Segment lengths
        cos_gamma, sin_gamma: Cosine and (non-negative) sine of the angle between e1 and e2
        p: Kernel exponent
    """
    l1 = np.asarray(length_1, dtype=float)
    l2 = np.asarray(length_2, dtype=float)
    cg = np.asarray(cos_gamma, dtype=float)
    sg = np.abs(np.asarray(sin_gamma, dtype=float))

    def wedge(ratio):
        return segment_potential(sg, ratio - cg, p) - segment_potential(sg, -cg, p)

    return (l1 ** (p + 2.0) * wedge(l2 / l1) + l2 ** (p + 2.0) * wedge(l1 / l2)) / (p + 2.0)


def geometric_breakpoints(start: float, stop: float, ratio: float = 1.5) -> np.ndarray:
    """Breakpoints from start to stop whose successive ratios do not exceed ratio"""
    if not 0.0 < start < stop:
        raise DomainError(f"geometric breakpoints need 0 < start < stop, got {start}, {stop}")
    count = max(1, int(math.ceil(math.log(stop / start) / math.log(ratio) - 1e-12)))
    return np.geomspace(start, stop, count + 1)


def graded_breakpoints(center: float, left: float, right: float,
                       ratio: float = 0.25, levels: int = 10) -> np.ndarray:
    """
    Breakpoints in [left, right] accumulating geometrically at center.

    Intervals shrink by `ratio` per level on both sides of center; a side of
    zero width contributes nothing.
    """
    if not left <= center <= right:
        raise DomainError(f"grading center {center} outside [{left}, {right}]")
    powers = ratio ** np.arange(levels + 1)
    points = [np.array([left, center, right])]
    if center > left:
        points.append(center - (center - left) * powers)
    if right > center:
        points.append(center + (right - center) * powers)
    return np.unique(np.concatenate(points))


def composite_rule(breakpoints, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule with n nodes on every interval between breakpoints"""
    bp = np.asarray(breakpoints, dtype=float)
    nodes, weights = gauss_rule(n).mapped(bp[:-1], bp[1:])
    return nodes.ravel(), weights.ravel()
