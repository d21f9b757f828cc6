"""Hermite polynomials, half-integer factorials and Gauss-Hermite rules.

Everything here is pure. Quadrature rules are cached per order and their
arrays are marked read-only, so a rule can be shared freely.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Tuple, Union

import numpy as np
import structlog
from numpy.polynomial.hermite import hermgauss
from numpy.typing import ArrayLike, NDArray

from hg_entangle.exceptions import InputError, QuadratureError
from hg_entangle.models.quadrature import QuadratureSpec

logger = structlog.get_logger(__name__)

# Beyond this order the smallest weights underflow double precision.
MAX_RULE_ORDER = 256

SQRT_PI = math.sqrt(math.pi)

RealOrArray = Union[float, NDArray[np.float64]]


def hermite_polynomial(l: int, x: ArrayLike) -> RealOrArray:  # noqa: E741
    """Physicists' Hermite polynomial H_l(x) by the three-term recurrence.

    Args:
        l: Degree, l >= 0
        x: Evaluation point(s)

    Returns:
        H_l(x) with the shape of ``x`` (a float for scalar input)
    """
    if l < 0:
        raise InputError("Hermite degree must be nonnegative", l=l)
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if l == 0:
        return h_prev[()]
    h = 2.0 * x
    for k in range(1, l):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h[()]


def hermite_coefficient(l: int, k: int) -> int:  # noqa: E741
    """Signed coefficient of (2x)^{l-2k} in H_l(x)."""
    magnitude = math.factorial(l) // (math.factorial(l - 2 * k) * math.factorial(k))
    return -magnitude if k % 2 else magnitude


def hermite_polynomial_series(l: int, x: float) -> float:  # noqa: E741
    """H_l(x) from the explicit finite sum, evaluated in exact rational arithmetic."""
    if l < 0:
        raise InputError("Hermite degree must be nonnegative", l=l)
    two_x = 2 * Fraction(x)
    total = sum(
        (hermite_coefficient(l, k) * two_x ** (l - 2 * k) for k in range(l // 2 + 1)), Fraction(0)
    )
    return float(total)


def hermite_functions(max_degree: int, x: ArrayLike) -> NDArray[np.float64]:
    """Normalized values h_l(x) = H_l(x) / sqrt(2^l l!) for l = 0..max_degree.

    Uses h_{l+1} = sqrt(2/(l+1)) x h_l - sqrt(l/(l+1)) h_{l-1}, which stays
    in range where the raw polynomials overflow.

    Returns:
        Array of shape ``(max_degree + 1,) + x.shape``
    """
    if max_degree < 0:
        raise InputError("max_degree must be nonnegative", max_degree=max_degree)
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((max_degree + 1,) + x.shape, dtype=np.float64)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = math.sqrt(2.0) * x
    for l in range(1, max_degree):  # noqa: E741
        out[l + 1] = math.sqrt(2.0 / (l + 1)) * x * out[l] - math.sqrt(l / (l + 1)) * out[l - 1]
    return out


def _half_lattice_index(x: Union[float, Fraction]) -> int:
    twice = Fraction(x) * 2
    if twice.denominator != 1:
        raise InputError("argument must be a multiple of 1/2", x=float(x))
    if twice < -1:
        raise InputError("argument must be >= -1/2", x=float(x))
    return int(twice)


def half_integer_factorial_exact(x: Union[float, Fraction]) -> Tuple[Fraction, bool]:
    """Gamma(x + 1) on the half-integer lattice, split into a rational part.

    Returns:
        ``(q, carries_sqrt_pi)`` with Gamma(x + 1) = q, or q * sqrt(pi) when the flag is set
    """
    twice = _half_lattice_index(x)
    if twice % 2 == 0:
        return Fraction(math.factorial(twice // 2)), False
    # x = k - 1/2, Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    k = (twice + 1) // 2
    return Fraction(math.factorial(2 * k), 4**k * math.factorial(k)), True


def half_integer_factorial(x: Union[float, Fraction]) -> float:
    """Gamma(x + 1) for 2x an integer >= -1; equals x! for integer x."""
    rational, carries_sqrt_pi = half_integer_factorial_exact(x)
    value = float(rational)
    return value * SQRT_PI if carries_sqrt_pi else value


@dataclass(frozen=True)
class GaussHermiteRule:
    """Nodes and weights for the integral of p(u) e^{-u^2} over the real line."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]

    @property
    def order(self) -> int:
        return int(self.nodes.shape[0])

    def envelope_weights(self) -> NDArray[np.float64]:
        """Weights for integrands that already carry their own e^{-u^2} factor."""
        return np.exp(np.log(self.weights) + self.nodes**2)

    def integrate(self, values: ArrayLike) -> float:
        """Sum of weight * value over the nodes (values sampled at ``nodes``)."""
        return float(np.dot(self.weights, np.asarray(values, dtype=np.float64)))


@lru_cache(maxsize=32)
def _rule_for_order(order: int) -> GaussHermiteRule:
    nodes, weights = hermgauss(order)
    # hermgauss is symmetric up to rounding; enforce it exactly.
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if not np.all(weights > 0):
        raise QuadratureError("Gauss-Hermite weights underflowed", rule_order=order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug("Gauss-Hermite rule computed", rule_order=order)
    return GaussHermiteRule(nodes=nodes, weights=weights)


def gauss_hermite_rule(spec: QuadratureSpec) -> GaussHermiteRule:
    """Gauss-Hermite rule exact for polynomials of degree <= 2 * rule_order - 1.

    Raises:
        QuadratureError: if the order exceeds MAX_RULE_ORDER
    """
    if spec.rule_order > MAX_RULE_ORDER:
        raise QuadratureError(
            "Gauss-Hermite rule order above supported maximum",
            rule_order=spec.rule_order,
            max_rule_order=MAX_RULE_ORDER,
        )
    return _rule_for_order(spec.rule_order)


def require_exact_degree(spec: QuadratureSpec, degree: int, **context: object) -> None:
    """Raise QuadratureError unless the rule integrates ``degree`` exactly."""
    if degree > spec.exact_degree():
        raise QuadratureError(
            "Quadrature order too low for requested indices",
            rule_order=spec.rule_order,
            polynomial_degree=degree,
            **context,
        )


def require_converged(
    spec: QuadratureSpec, integrate: Callable[[GaussHermiteRule], float], **context: object
) -> float:
    """Evaluate ``integrate`` on the rule and on the doubled rule.

    The doubled order is capped at MAX_RULE_ORDER; at the cap only one
    evaluation is made.

    Raises:
        QuadratureError: if the two values differ by more than ``spec.abs_tolerance``
    """
    value = integrate(gauss_hermite_rule(spec))
    refined_order = min(spec.refined().rule_order, MAX_RULE_ORDER)
    if refined_order <= spec.rule_order:
        return value
    refined = integrate(_rule_for_order(refined_order))
    change = abs(refined - value)
    if change > spec.abs_tolerance:
        raise QuadratureError(
            "Quadrature did not converge under refinement",
            rule_order=spec.rule_order,
            change=change,
            abs_tolerance=spec.abs_tolerance,
            **context,
        )
    return value
