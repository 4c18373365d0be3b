"""Special functions, kernel constants and admissible orders"""
import math

import numpy as np
import pytest
import scipy.special

from src.numerics.errors import ConfigurationError, DomainError, SingularityError
from src.numerics.specfun import (FracOrder, bessel_j0, flap_constant, fundamental_solution, gamma_fn,
                                  kernel_constants, riesz_constant, unit_sphere_area)


def reference_riesz(d, alpha):
    return math.gamma(0.5 * d - alpha) / (4.0 ** alpha * math.pi ** (0.5 * d) * math.gamma(alpha))


@pytest.mark.parametrize(("x", "expected"), [
    (1.0, 1.0),
    (0.5, math.sqrt(math.pi)),
    (0.25, 3.6256099082219083),
    (5.0, 24.0),
])
def test_gamma_known_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-13)


def test_gamma_matches_reference_on_grid():
    for x in np.linspace(0.05, 30.0, 300):
        assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_gamma_recurrence():
    for x in np.linspace(0.1, 20.0, 80):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float('nan'), float('inf')])
def test_gamma_rejects_non_positive(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_domain_error_is_a_value_error():
    with pytest.raises(ValueError):
        gamma_fn(-2.0)


def test_bessel_known_values():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j0(1.0) == pytest.approx(0.7651976865579666, abs=1e-10)
    assert abs(bessel_j0(2.404825557695773)) < 1e-9


def test_bessel_matches_reference_on_both_branches():
    s = np.linspace(0.0, 1000.0, 20001)
    np.testing.assert_allclose(bessel_j0(s), scipy.special.j0(s), rtol=0, atol=1e-10)


def test_bessel_around_branch_switch():
    s = np.linspace(11.0, 13.0, 2001)
    np.testing.assert_allclose(bessel_j0(s), scipy.special.j0(s), rtol=0, atol=1e-10)


def test_bessel_envelope():
    w = np.linspace(0.5, 1000.0, 5000)
    assert np.all(np.abs(bessel_j0(w)) * np.sqrt(w) <= 1.0)


def test_bessel_keeps_shape():
    values = bessel_j0(np.ones((3, 4)))
    assert values.shape == (3, 4)
    assert isinstance(bessel_j0(2.0), float)


def test_bessel_negative_arguments():
    with pytest.raises(DomainError):
        bessel_j0(-1.0)
    assert bessel_j0(-1.0, allow_negative=True) == pytest.approx(bessel_j0(1.0), abs=1e-15)


@pytest.mark.parametrize(("d", "alpha"), [(2, 0.51), (2, 0.6), (2, 0.75), (3, 0.55), (3, 0.99)])
def test_admissible_orders(d, alpha):
    order = FracOrder(d, alpha)
    assert order.kernel_exponent == pytest.approx(2 * alpha - d)


@pytest.mark.parametrize(("d", "alpha"), [(2, 0.5), (2, 0.9), (2, 0.76), (3, 0.5), (3, 1.0), (4, 0.6), (2, float('nan'))])
def test_inadmissible_orders(d, alpha):
    with pytest.raises(ConfigurationError, match="alpha out of admissible range|dimension"):
        FracOrder(d, alpha)


def test_relaxed_order_range():
    assert FracOrder.relaxed(3, 0.3).alpha == 0.3
    assert FracOrder.relaxed(2, 1.0).alpha == 1.0
    with pytest.raises(ConfigurationError):
        FracOrder.relaxed(2, 0.0)


def test_order_is_frozen_and_printable():
    order = FracOrder(2, 0.6)
    assert str(order) == "d=2, alpha=0.6"
    with pytest.raises(Exception):
        order.alpha = 0.7


@pytest.mark.parametrize(("d", "alpha"), [(2, 0.55), (2, 0.6), (2, 0.75), (3, 0.6), (3, 0.9)])
def test_riesz_constant_formula(d, alpha):
    assert riesz_constant(FracOrder(d, alpha)) == pytest.approx(reference_riesz(d, alpha), rel=1e-12)


def test_riesz_constant_examples():
    assert riesz_constant(FracOrder(2, 0.75)) == pytest.approx(0.33297, abs=1e-4)
    assert riesz_constant(FracOrder(2, 0.6)) == pytest.approx(0.20638, abs=1e-4)
    # Gamma(1) / (2 pi^(3/2) Gamma(1/2)) = 1 / (2 pi^2)
    assert riesz_constant(FracOrder.relaxed(3, 0.5)) == pytest.approx(1.0 / (2.0 * math.pi ** 2), rel=1e-13)


def test_flap_constant_half_order():
    assert flap_constant(FracOrder.relaxed(2, 0.5)) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-13)


def test_kernel_constants_positive():
    for d, alpha in [(2, 0.55), (2, 0.75), (3, 0.6), (3, 0.95)]:
        constants = kernel_constants(FracOrder(d, alpha))
        assert constants.riesz_c > 0
        assert constants.flap_c > 0


def test_fundamental_solution_at_unit_radius(order_075):
    assert fundamental_solution(order_075, [0.6, 0.8]) == pytest.approx(riesz_constant(order_075), rel=1e-14)


def test_fundamental_solution_homogeneity(order_075):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(20, 2))
    for t in (0.1, 2.0, 37.0):
        np.testing.assert_allclose(fundamental_solution(order_075, t * x),
                                   t ** order_075.kernel_exponent * fundamental_solution(order_075, x),
                                   rtol=1e-13)
    assert fundamental_solution(order_075, [2.0, 0.0]) == pytest.approx(
        2.0 ** -0.5 * fundamental_solution(order_075, [1.0, 0.0]), rel=1e-14)


def test_fundamental_solution_rotation_invariance(order_06):
    x = np.array([0.3, -1.2])
    c, s = math.cos(1.1), math.sin(1.1)
    rotated = np.array([[c, -s], [s, c]]) @ x
    assert fundamental_solution(order_06, rotated) == pytest.approx(fundamental_solution(order_06, x), rel=1e-14)


def test_fundamental_solution_three_dimensions():
    order = FracOrder.relaxed(3, 0.5)
    assert fundamental_solution(order, [0.0, 2.0, 0.0]) == pytest.approx(0.25 / (2.0 * math.pi ** 2), rel=1e-13)


def test_fundamental_solution_singularity(order_075):
    with pytest.raises(SingularityError):
        fundamental_solution(order_075, np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_fundamental_solution_checks_dimension(order_075):
    with pytest.raises(DomainError):
        fundamental_solution(order_075, [1.0, 0.0, 0.0])


def test_unit_sphere_area():
    assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)
