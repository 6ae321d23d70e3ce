import math

import numpy as np
import pytest

from domain.entities import SchemeCoefficients
from domain.exceptions import InvalidPolynomialError
from domain.integrators import adams_bashforth
from domain.stability import (
    ReducedQuadratic,
    check_consistency,
    coefficients_from_pq,
    cubic_margins,
    error_constant,
    generating_polynomials,
    hurwitz_transform,
    is_hurwitz,
    polynomial_roots,
    quadratic_margins,
    root_condition_oracle,
    satisfies_root_condition_cubic,
    satisfies_root_condition_quadratic,
    truncation_order,
)


def _away_from_circle(rho, band=1e-9):
    return np.all(np.abs(np.abs(polynomial_roots(rho)) - 1.0) > band)


def test_generating_polynomials_of_adams3(adams3):
    polys = generating_polynomials(adams3)
    assert polys.rho == (0.0, 0.0, -1.0, 1.0)
    assert polys.sigma == pytest.approx((5 / 12, -16 / 12, 23 / 12, 0.0))
    assert polys.k == 3


def test_adams_bashforth_is_consistent():
    for k in (3, 4, 5):
        assert check_consistency(adams_bashforth(k))


def test_consistency_fails_for_wrong_beta():
    coeffs = SchemeCoefficients(alpha=(0.0, 0.0, -1.0), beta=(0.0, 0.0, 0.5))
    assert not check_consistency(coeffs)


def test_consistency_tolerance_must_be_positive(adams3):
    with pytest.raises(ValueError):
        check_consistency(adams3, tol=0.0)


def test_hurwitz_transform_of_adams3(adams3):
    psi = hurwitz_transform(adams3.alpha)
    np.testing.assert_allclose(psi, [2.0, 4.0, 2.0, 0.0])


def test_hurwitz_transform_quadratic():
    # rho = chi^2 maps to (1 + z)^2
    psi = hurwitz_transform((0.0, 0.0))
    np.testing.assert_allclose(psi, [1.0, 2.0, 1.0])


def test_hurwitz_transform_rejects_other_degrees():
    with pytest.raises(InvalidPolynomialError):
        hurwitz_transform((0.0, 0.0, 0.0, -1.0))


def test_cubic_root_condition_examples():
    assert satisfies_root_condition_cubic((0.5, 0.0, 0.0))
    assert not satisfies_root_condition_cubic((0.0, 0.0, -1.0))
    assert not satisfies_root_condition_cubic((2.0, 0.0, 0.0))


def test_cubic_margins_of_half():
    np.testing.assert_allclose(cubic_margins((0.5, 0.0, 0.0)), [0.5, 1.5, 0.75, 0.5, 1.5])


def test_cubic_root_condition_needs_three_coefficients():
    with pytest.raises(InvalidPolynomialError):
        satisfies_root_condition_cubic((0.1, 0.2))


def test_quadratic_root_condition_examples():
    assert satisfies_root_condition_quadratic(0.0, 0.0)
    assert satisfies_root_condition_quadratic(0.0, 0.5)
    assert not satisfies_root_condition_quadratic(0.0, 1.0)
    assert not satisfies_root_condition_quadratic(2.5, 1.0)
    np.testing.assert_allclose(quadratic_margins(0.1, 0.05), [0.95, 0.95, 1.15])


def test_quadratic_inequalities_agree_with_root_oracle():
    rng = np.random.default_rng(0)
    checked = 0
    for p, q in rng.uniform(-2.0, 2.0, (10_000, 2)):
        rho = (q, p, 1.0)
        if not _away_from_circle(rho):
            continue
        checked += 1
        assert satisfies_root_condition_quadratic(p, q) == root_condition_oracle(rho, strict=True)
    assert checked > 9_900


def test_cubic_inequalities_agree_with_root_oracle():
    rng = np.random.default_rng(1)
    for alpha in rng.uniform(-2.0, 2.0, (10_000, 3)):
        rho = tuple(alpha) + (1.0,)
        if not _away_from_circle(rho):
            continue
        assert satisfies_root_condition_cubic(alpha) == root_condition_oracle(rho, strict=True)


def test_hurwitz_stability_agrees_with_inequalities():
    rng = np.random.default_rng(2)
    for alpha in rng.uniform(-1.5, 1.5, (2_000, 3)):
        rho = tuple(alpha) + (1.0,)
        if not _away_from_circle(rho, band=1e-6):
            continue
        assert is_hurwitz(hurwitz_transform(alpha)) == satisfies_root_condition_cubic(alpha)


def test_adams3_passes_only_the_lenient_oracle(adams3):
    rho = generating_polynomials(adams3).rho
    assert not root_condition_oracle(rho, strict=True)
    assert root_condition_oracle(rho, strict=False)


def test_double_root_on_circle_fails_lenient_oracle():
    # (chi - 1)^2 chi
    assert not root_condition_oracle((0.0, 1.0, -2.0, 1.0), strict=False)


def test_root_oracle_rejects_non_monic():
    with pytest.raises(InvalidPolynomialError):
        root_condition_oracle((0.0, 0.0, -1.0, 2.0))


def test_is_hurwitz_with_vanishing_leading_coefficient():
    # rho with a root at chi = -1
    assert not is_hurwitz(hurwitz_transform((1.0, 2.0)))


def test_from_pq_recovers_adams3():
    coeffs = coefficients_from_pq(ReducedQuadratic(0.0, 0.0), (5 / 12, -4 / 3))
    ab3 = adams_bashforth(3)
    np.testing.assert_allclose(coeffs.alpha, ab3.alpha)
    np.testing.assert_allclose(coeffs.beta, ab3.beta, atol=1e-13)


def test_from_pq_is_always_consistent():
    rng = np.random.default_rng(3)
    for p, q, b0, b1 in rng.uniform(-2.0, 2.0, (10_000, 4)):
        coeffs = coefficients_from_pq(ReducedQuadratic(p, q), (b0, b1))
        assert check_consistency(coeffs, tol=1e-12)


def test_from_pq_factorises_rho():
    coeffs = coefficients_from_pq(ReducedQuadratic(0.3, -0.2), (0.1, 0.2))
    rho = np.array(generating_polynomials(coeffs).rho)
    expected = np.polynomial.polynomial.polymul([-1.0, 1.0], [-0.2, 0.3, 1.0])
    np.testing.assert_allclose(rho, expected, atol=1e-15)


def test_error_constants_of_adams_bashforth():
    assert error_constant(adams_bashforth(3), 4) == pytest.approx(3 / 8)
    assert error_constant(adams_bashforth(4), 5) == pytest.approx(251 / 720)
    assert error_constant(adams_bashforth(5), 6) == pytest.approx(95 / 288)


def test_truncation_orders():
    for k in (3, 4, 5):
        assert truncation_order(adams_bashforth(k)) == k
    inconsistent = SchemeCoefficients(alpha=(0.0, 0.0, -0.5), beta=(0.0, 0.0, 1.0))
    assert truncation_order(inconsistent) == -1


def test_zeroth_error_constant_is_rho_at_one(adams3):
    assert error_constant(adams3, 0) == 0.0
    assert math.isclose(
        error_constant(SchemeCoefficients((0.0, 0.0, -0.5), (0.0, 0.0, 1.0)), 0), 0.5
    )
