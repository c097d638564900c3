"""Shared value types. Construction validates; nothing here computes beyond that."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

__all__ = [
    "ParameterError",
    "EvaluationError",
    "RuleParams",
    "ConvexityParams",
    "FunctionSpec",
    "BoundReport",
    "Certificate",
    "make_rule_params",
]


class ParameterError(ValueError):
    """An argument lies outside its admissible range."""

    def __init__(self, name: str, message: str):
        super().__init__(message)
        self.name = name


class EvaluationError(ArithmeticError):
    """A function produced a non-finite value or hit a domain error at ``x``."""

    def __init__(self, message: str, x: float):
        super().__init__(message)
        self.x = x


def _finite(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, f"{name} must be a real number") from None
    if not math.isfinite(value):
        raise ParameterError(name, f"{name} must be finite")
    return value


def _unit(name: str, value) -> float:
    value = _finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise ParameterError(name, f"{name} must lie in [0,1]")
    return value


def _scale(name: str, value) -> float:
    value = _finite(name, value)
    if not 0.0 < value <= 1.0:
        raise ParameterError(name, f"{name} must lie in (0,1]")
    return value


@dataclass(frozen=True)
class RuleParams:
    """One member of the (theta, lambda) rule family on the scaled interval [ma, mb].

    ``theta`` weights the interior node, ``lam`` mixes the two endpoints and
    places the interior node at ``m*C`` with ``C = (1-lam)*a + lam*b``.
    """

    theta: float
    lam: float
    m: float
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _unit("theta", self.theta))
        object.__setattr__(self, "lam", _unit("lambda", self.lam))
        object.__setattr__(self, "m", _scale("m", self.m))
        a = _finite("a", self.a)
        b = _finite("b", self.b)
        if a < 0:
            raise ParameterError("a", "a must be >= 0")
        if not a < b:
            raise ParameterError("b", "a < b required")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def c(self) -> float:
        # clamp guards the last ulp; (1-lam)*a + lam*b can round just outside [a, b]
        return min(max((1.0 - self.lam) * self.a + self.lam * self.b, self.a), self.b)

    @property
    def width(self) -> float:
        """m(b - a), the length of the integration interval."""
        return self.m * (self.b - self.a)


def make_rule_params(theta, lam, m, a, b) -> RuleParams:
    return RuleParams(theta, lam, m, a, b)


@dataclass(frozen=True)
class ConvexityParams:
    """(alpha, m, q) under which |f'|^q is claimed (alpha, m)-convex.

    ``p`` is the conjugate exponent q/(q-1), or None when q == 1.
    """

    alpha: float
    m: float
    q: float
    p: Optional[float] = field(init=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _unit("alpha", self.alpha))
        object.__setattr__(self, "m", _scale("m", self.m))
        q = _finite("q", self.q)
        if q < 1:
            raise ParameterError("q", "q must be >= 1")
        object.__setattr__(self, "q", q)
        if q > 1:
            object.__setattr__(self, "p", q / (q - 1.0))


@dataclass(frozen=True)
class FunctionSpec:
    """A corpus entry. Expression fields hold source text; see ``amquad.expr``."""

    name: str
    f_expr: str
    fprime_expr: str
    domain_b: float
    claimed: tuple = ()
    f4_sup: Optional[float] = None

    def __post_init__(self):
        if not self.name or not self.name.replace("_", "a").replace("-", "a").isalnum():
            raise ParameterError("name", f"invalid function name {self.name!r}")
        b = _finite("domain_b", self.domain_b)
        if b <= 0:
            raise ParameterError("domain_b", "domain_b must be > 0")
        object.__setattr__(self, "domain_b", b)
        object.__setattr__(self, "claimed", tuple(self.claimed))
        if self.f4_sup is not None:
            s = _finite("f4_sup", self.f4_sup)
            if s < 0:
                raise ParameterError("f4_sup", "f4_sup must be >= 0")
            object.__setattr__(self, "f4_sup", s)


@dataclass(frozen=True)
class BoundReport:
    """Defect of one rule together with both closed-form bounds.

    Holder fields are None when q == 1.  Branch tags are "b1"/"b2" (or
    "b3"/"b4"), or "tie" when the two branches agree to 1e-12 relative.
    """

    defect: float
    bound_powermean: Optional[float]
    b1: float
    b2: float
    pm_argmin: str
    bound_holder: Optional[float]
    b3: Optional[float]
    b4: Optional[float]
    h_argmin: Optional[str]

    @property
    def margin_pm(self) -> Optional[float]:
        if self.bound_powermean is None:
            return None
        return self.bound_powermean - abs(self.defect)

    @property
    def margin_h(self) -> Optional[float]:
        if self.bound_holder is None:
            return None
        return self.bound_holder - abs(self.defect)

    @property
    def tighter(self) -> Optional[str]:
        """Which route gives the smaller bound: "powermean", "holder", or "tie"."""
        if self.bound_holder is None or self.bound_powermean is None:
            return None
        if math.isclose(self.bound_holder, self.bound_powermean, rel_tol=1e-12, abs_tol=0.0):
            return "tie"
        return "holder" if self.bound_holder < self.bound_powermean else "powermean"


@dataclass(frozen=True)
class Certificate:
    """Sampling record for one (alpha, m)-convexity check.

    A pass means no violation was found on the sampled triples; it is not a proof.
    """

    passed: bool
    samples_checked: int
    worst_violation: float
    slack: float
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.passed
