"""Consistency and zero-stability of explicit linear multistep schemes.

Polynomials are stored in ascending order (index i holds the coefficient of
chi^i), matching the alpha index of a scheme. Hurwitz transforms are returned
highest degree first, the way they are usually written.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from domain.entities import SchemeCoefficients
from domain.exceptions import InvalidPolynomialError


@dataclass(frozen=True)
class GeneratingPolynomials:
    rho: Tuple[float, ...]
    sigma: Tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.rho) - 1


@dataclass(frozen=True)
class ReducedQuadratic:
    """Quadratic factor of rho(chi) = (chi - 1)(chi^2 + p chi + q)."""

    p: float
    q: float


def generating_polynomials(coeffs: SchemeCoefficients) -> GeneratingPolynomials:
    return GeneratingPolynomials(
        rho=coeffs.alpha + (1.0,),
        sigma=coeffs.beta + (0.0,),
    )


def _consistency_residuals(coeffs: SchemeCoefficients) -> Tuple[float, float]:
    polys = generating_polynomials(coeffs)
    rho_at_one = math.fsum(polys.rho)
    rho_slope_at_one = math.fsum(i * a for i, a in enumerate(polys.rho))
    sigma_at_one = math.fsum(polys.sigma)
    return rho_at_one, rho_slope_at_one - sigma_at_one


def check_consistency(coeffs: SchemeCoefficients, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise ValueError("Consistency tolerance must be positive")
    rho_at_one, slope_gap = _consistency_residuals(coeffs)
    return abs(rho_at_one) <= tol and abs(slope_gap) <= tol


def hurwitz_transform(alpha: Sequence[float]) -> np.ndarray:
    """psi(z) = (1 - z)^k rho((1 + z)/(1 - z)) for monic quadratic or cubic rho.

    ``alpha`` is ascending, (a0, a1) or (a0, a1, a2).
    """
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) == 2:
        a0, a1 = alpha
        return np.array([
            1.0 - a1 + a0,
            2.0 * (1.0 - a0),
            1.0 + a1 + a0,
        ])
    if len(alpha) == 3:
        a0, a1, a2 = alpha
        return np.array([
            1.0 - a2 + a1 - a0,
            3.0 - a2 - a1 + 3.0 * a0,
            3.0 + a2 - a1 - 3.0 * a0,
            1.0 + a2 + a1 + a0,
        ])
    raise InvalidPolynomialError(
        f"Hurwitz transform is defined for 2 or 3 coefficients, got {len(alpha)}"
    )


def quadratic_margins(p: float, q: float) -> np.ndarray:
    """Routh-Hurwitz margins of chi^2 + p chi + q; all positive iff roots inside the unit disc."""
    return np.array([1.0 - p + q, 1.0 - q, 1.0 + p + q])


def cubic_margins(alpha: Sequence[float]) -> np.ndarray:
    """Routh-Hurwitz margins of chi^3 + a2 chi^2 + a1 chi + a0."""
    a0, a1, a2 = (float(a) for a in alpha)
    return np.array([
        1.0 - a2 + a1 - a0,
        1.0 + a2 + a1 + a0,
        1.0 - a1 + a2 * a0 - a0 * a0,
        1.0 - a0,
        1.0 + a0,
    ])


def satisfies_root_condition_quadratic(p: float, q: float) -> bool:
    return bool(np.all(quadratic_margins(p, q) > 0))


def satisfies_root_condition_cubic(alpha: Sequence[float]) -> bool:
    if len(alpha) != 3:
        raise InvalidPolynomialError(f"Cubic root condition needs 3 coefficients, got {len(alpha)}")
    return bool(np.all(cubic_margins(alpha) > 0))


def polynomial_roots(rho: Sequence[float]) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.float64)
    if rho.ndim != 1 or len(rho) not in (3, 4):
        raise InvalidPolynomialError("Root oracle expects a quadratic or cubic polynomial")
    if rho[-1] != 1.0:
        raise InvalidPolynomialError(f"Root oracle expects a monic polynomial, leading coefficient {rho[-1]}")
    # np.roots builds the companion matrix from descending coefficients
    return np.roots(rho[::-1])


def root_condition_oracle(
    rho: Sequence[float],
    strict: bool = True,
    tol: float = 1e-12,
    circle_tol: float = 1e-7,
    multiplicity_tol: float = 1e-6
) -> bool:
    """Numeric root condition.

    The strict variant requires every root strictly inside the disc of radius
    1 - tol. The lenient variant allows roots on the unit circle provided they
    are simple.
    """
    roots = polynomial_roots(rho)
    moduli = np.abs(roots)
    if strict:
        return bool(np.all(moduli < 1.0 - tol))

    if np.any(moduli > 1.0 + circle_tol):
        return False
    on_circle = np.abs(moduli - 1.0) <= circle_tol
    for i in np.flatnonzero(on_circle):
        neighbours = np.abs(roots - roots[i]) <= multiplicity_tol
        if np.count_nonzero(neighbours) > 1:
            return False
    return True


def is_hurwitz(psi: Sequence[float]) -> bool:
    """All roots of psi (highest degree first) in the open left half-plane."""
    psi = np.asarray(psi, dtype=np.float64)
    # a vanishing leading coefficient means rho has a root at chi = -1
    if psi[0] == 0.0:
        return False
    return bool(np.all(np.roots(psi).real < 0.0))


def coefficients_from_pq(pq: ReducedQuadratic, beta01: Sequence[float]) -> SchemeCoefficients:
    p, q = float(pq.p), float(pq.q)
    beta0, beta1 = (float(b) for b in beta01)
    beta2 = (1.0 + p + q) - beta0 - beta1
    return SchemeCoefficients(
        alpha=(-q, q - p, p - 1.0),
        beta=(beta0, beta1, beta2),
    )


def error_constant(coeffs: SchemeCoefficients, order: int) -> float:
    """C_q of the local truncation error, with alpha_k = 1 and beta_k = 0 included."""
    polys = generating_polynomials(coeffs)
    if order == 0:
        return math.fsum(polys.rho)
    rho_moment = math.fsum(i ** order * a for i, a in enumerate(polys.rho))
    sigma_moment = math.fsum(i ** (order - 1) * b for i, b in enumerate(polys.sigma))
    return rho_moment / math.factorial(order) - sigma_moment / math.factorial(order - 1)


def truncation_order(coeffs: SchemeCoefficients, tol: float = 1e-10, max_order: int = 10) -> int:
    """Largest p such that C_0..C_p vanish; -1 when the scheme is not even zeroth order."""
    order = -1
    for q in range(max_order + 1):
        scale = max(1.0, float(np.max(np.abs(coeffs.as_vector()))) * coeffs.k ** q)
        if abs(error_constant(coeffs, q)) > tol * scale:
            break
        order = q
    return order
