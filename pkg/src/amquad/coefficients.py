"""Closed-form weight integrals appearing in the two error bounds.

Each function is written term-for-term in its printed form (no simplification)
so it can be read against the formula.  The numerical cross-checks live in the
test suite.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import ParameterError

__all__ = ["WeightMoments", "a1", "weight_moments", "holder_factor", "e_coeff"]


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(name, f"{name} must lie in [0,1]")


def a1(theta: float) -> float:
    """Integral of |t - theta| over [0, 1]."""
    _check_unit("theta", theta)
    return theta**2 - theta + 0.5


@dataclass(frozen=True)
class WeightMoments:
    """A2..A5: the t^alpha and (1 - t^alpha) parts of the |t - theta| kernel.

    a2 + a3 == a4 + a5 == a1(theta).
    """

    a2: float
    a3: float
    a4: float
    a5: float


def weight_moments(theta: float, alpha: float) -> WeightMoments:
    _check_unit("theta", theta)
    _check_unit("alpha", alpha)
    k = (alpha + 1) * (alpha + 2)
    s = 1 - theta
    a2 = 2 * theta ** (alpha + 2) / k - theta / (alpha + 1) + 1 / (alpha + 2)
    a3 = theta**2 - 2 * theta ** (alpha + 2) / k - alpha * theta / (alpha + 1) + alpha / (2 * (alpha + 2))
    a4 = 2 * s ** (alpha + 2) / k - s / (alpha + 1) + 1 / (alpha + 2)
    a5 = s**2 - 2 * s ** (alpha + 2) / k - alpha * s / (alpha + 1) + alpha / (2 * (alpha + 2))
    return WeightMoments(a2, a3, a4, a5)


def holder_factor(theta: float, p: float) -> float:
    """Integral of |t - theta|^p over [0, 1] (before taking the 1/p root).

    ``p == 1`` is accepted and reduces to ``a1(theta)``.
    """
    _check_unit("theta", theta)
    if p <= 0:
        raise ParameterError("p", "p must be > 0")
    return (theta ** (p + 1) + (1 - theta) ** (p + 1)) / (p + 1)


def e_coeff(x_q: float, y_q: float, alpha: float, m: float) -> float:
    """(x_q + alpha*m*y_q) / (alpha + 1).

    ``x_q`` sits in the endpoint slot (weight t^alpha), ``y_q`` in the
    companion slot (weight m*(1 - t^alpha)).
    """
    if x_q < 0:
        raise ParameterError("x_q", "x_q must be >= 0")
    if y_q < 0:
        raise ParameterError("y_q", "y_q must be >= 0")
    _check_unit("alpha", alpha)
    if not 0.0 < m <= 1.0:
        raise ParameterError("m", "m must lie in (0,1]")
    return (x_q + alpha * m * y_q) / (alpha + 1)
