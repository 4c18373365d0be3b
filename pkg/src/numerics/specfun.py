"""
Special functions and kernel normalization constants.
Follows SRP - Single responsibility for the scalar analysis every other
numerics module builds on.
"""
import math
from typing import ClassVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ConfigurationError, DomainError, SingularityError

ArrayLike = Union[float, np.ndarray]


class GammaConstants:
    """Lanczos approximation parameters (g = 7, nine terms)"""
    G: float = 7.0
    COEFFICIENTS: tuple = (
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    )


class BesselConstants:
    """Switch point between the power series and the Hankel expansion"""
    SERIES_LIMIT: float = 12.0
    SERIES_TERMS: int = 48
    ASYMPTOTIC_MAX_TERMS: int = 80


class FracOrder(BaseModel):
    """
    Space dimension and fractional order.

    Strict construction enforces the ranges where the boundary problem is
    uniquely solvable; `FracOrder.relaxed` admits 0 < alpha <= 1 for the
    oracle and for kernel-only uses.
    """
    model_config = ConfigDict(frozen=True)

    STRICT_RANGES: ClassVar[dict] = {2: (0.5, 0.75, True), 3: (0.5, 1.0, False)}

    d: int
    alpha: float
    enforce_range: bool = Field(default=True)

    def __init__(self, d: int, alpha: float, enforce_range: bool = True, **kwargs):
        _check_order(d, alpha, enforce_range)
        super().__init__(d=d, alpha=alpha, enforce_range=enforce_range, **kwargs)

    @model_validator(mode='after')
    def _validate_ranges(self) -> "FracOrder":
        _check_order(self.d, self.alpha, self.enforce_range)
        return self

    @classmethod
    def relaxed(cls, d: int, alpha: float) -> "FracOrder":
        return cls(d, alpha, enforce_range=False)

    @property
    def kernel_exponent(self) -> float:
        return 2.0 * self.alpha - self.d

    def __str__(self) -> str:
        return f"d={self.d}, alpha={self.alpha:g}"


def _check_order(d, alpha, enforce_range: bool) -> None:
    if d not in (2, 3):
        raise ConfigurationError(f"dimension must be 2 or 3, got {d}")
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise ConfigurationError(f"alpha out of admissible range: {alpha!r} is not a number")
    if not math.isfinite(alpha):
        raise ConfigurationError(f"alpha out of admissible range: {alpha}")
    if enforce_range:
        low, high, high_closed = FracOrder.STRICT_RANGES[d]
        inside = low < alpha and (alpha <= high if high_closed else alpha < high)
        if not inside:
            bracket = "]" if high_closed else ")"
            raise ConfigurationError(
                f"alpha out of admissible range: alpha={alpha} not in ({low}, {high}{bracket} for d={d}"
            )
    elif not 0.0 < alpha <= 1.0:
        raise ConfigurationError(f"alpha out of admissible range: alpha={alpha} not in (0, 1]")


class KernelConstants(BaseModel):
    """Normalizations of the Riesz kernel and of the fractional Laplacian"""
    model_config = ConfigDict(frozen=True)

    riesz_c: float = Field(gt=0)
    flap_c: float = Field(gt=0)


def gamma_fn(x: float) -> float:
    """
    Gamma function for positive arguments.

    Args:
        x: Positive finite argument

    Returns:
        Gamma(x) with relative accuracy around 1e-15 on (0, 30]

    Raises:
        DomainError: x <= 0 or x not finite
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma_fn requires a positive finite argument, got {x}")
    return _lanczos_gamma(x)


def _lanczos_gamma(x: float) -> float:
    if x < 0.5:
        # Reflection formula
        return math.pi / (math.sin(math.pi * x) * _lanczos_gamma(1.0 - x))
    x -= 1.0
    coefficients = GammaConstants.COEFFICIENTS
    acc = coefficients[0]
    for k in range(1, len(coefficients)):
        acc += coefficients[k] / (x + k)
    t = x + GammaConstants.G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def bessel_j0(s: ArrayLike, allow_negative: bool = False) -> ArrayLike:
    """
    Bessel function of the first kind, order zero.

    Power series up to |s| = 12, Hankel asymptotic expansion beyond, summed
    until the terms stop decreasing. Absolute accuracy better than 1e-10.

    Args:
        s: Scalar or array argument
        allow_negative: Evaluate negative arguments through the even extension

    Returns:
        J0(s) with the shape of s
    """
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j0 requires finite arguments")
    if np.any(arr < 0.0):
        if not allow_negative:
            raise DomainError(f"bessel_j0 requires s >= 0, got {arr.min()}")
        arr = np.abs(arr)

    out = np.empty_like(arr)
    small = arr <= BesselConstants.SERIES_LIMIT
    if np.any(small):
        out[small] = _j0_series(arr[small])
    if np.any(~small):
        out[~small] = _j0_hankel(arr[~small])

    if np.ndim(s) == 0:
        return float(out)
    return out


def _j0_series(s: np.ndarray) -> np.ndarray:
    q = -0.25 * s * s
    term = np.ones_like(s)
    total = np.ones_like(s)
    for k in range(1, BesselConstants.SERIES_TERMS):
        term = term * q / (k * k)
        total += term
    return total


def _j0_hankel(s: np.ndarray) -> np.ndarray:
    p_sum = np.ones_like(s)
    q_sum = np.zeros_like(s)
    term = np.ones_like(s)
    active = np.ones(s.shape, dtype=bool)
    for k in range(1, BesselConstants.ASYMPTOTIC_MAX_TERMS):
        nxt = term * (-(2.0 * k - 1.0) ** 2) / (8.0 * k * s)
        active &= np.abs(nxt) < np.abs(term)
        if not np.any(active):
            break
        # a_k / s^k enters P for even k and Q for odd k with alternating signs
        sign = -1.0 if (k // 2) % 2 else 1.0
        contribution = np.where(active, sign * nxt, 0.0)
        if k % 2:
            q_sum += contribution
        else:
            p_sum += contribution
        term = np.where(active, nxt, term)
    chi = s - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * s)) * (p_sum * np.cos(chi) - q_sum * np.sin(chi))


def riesz_constant(order: FracOrder) -> float:
    """C = Gamma(d/2 - alpha) / (4^alpha pi^(d/2) Gamma(alpha))"""
    d, alpha = order.d, order.alpha
    return gamma_fn(0.5 * d - alpha) / (4.0 ** alpha * math.pi ** (0.5 * d) * gamma_fn(alpha))


def flap_constant(order: FracOrder) -> float:
    """
    Positive constant of the singular-integral form of the fractional Laplacian.

    -(-Delta)^alpha u(x) = flap_constant * p.v. int (u(x+z) - u(x)) / |z|^(d+2 alpha) dz
    """
    d, alpha = order.d, order.alpha
    # |Gamma(-alpha)| = Gamma(1 - alpha) / alpha for 0 < alpha < 1
    abs_gamma_neg = gamma_fn(1.0 - alpha) / alpha
    return 4.0 ** alpha * gamma_fn(0.5 * d + alpha) / (math.pi ** (0.5 * d) * abs_gamma_neg)


def kernel_constants(order: FracOrder) -> KernelConstants:
    return KernelConstants(riesz_c=riesz_constant(order), flap_c=flap_constant(order))


def fundamental_solution(order: FracOrder, x: np.ndarray) -> ArrayLike:
    """
    Riesz kernel phi(x) = C |x|^(2 alpha - d).

    Args:
        order: Dimension and order
        x: Points with coordinates on the trailing axis

    Returns:
        Kernel values, one per point

    Raises:
        SingularityError: Any point at the origin
    """
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != order.d:
        raise DomainError(f"points must have {order.d} coordinates on the last axis, got shape {pts.shape}")
    r = np.linalg.norm(pts, axis=-1)
    if np.any(r == 0.0):
        raise SingularityError("fundamental solution evaluated at the origin")
    values = riesz_constant(order) * r ** order.kernel_exponent
    if np.ndim(values) == 0:
        return float(values)
    return values


def unit_sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d"""
    return 2.0 * math.pi ** (0.5 * d) / gamma_fn(0.5 * d)
