"""Rule defect, its power-mean and Holder bounds, presets, and the classical inequalities."""
from __future__ import annotations

import enum
import math
from typing import Callable

from . import coefficients as co
from .integrator import DEFAULT_TOL, integrate
from .model import BoundReport, ConvexityParams, EvaluationError, ParameterError, RuleParams

__all__ = [
    "Preset",
    "preset_rule",
    "rule_value",
    "defect",
    "b_pair_powermean",
    "bound_powermean",
    "b_pair_holder",
    "bound_holder",
    "bound_report",
    "powermean_prefactor",
    "holder_prefactor",
    "preset_powermean_bound",
    "preset_holder_prefactor",
    "preset_holder_prefactor_text",
    "preset_holder_bound",
    "simpson_compact_bound",
    "hermite_hadamard",
    "classical_simpson_bound",
]


class Preset(enum.Enum):
    """Named (theta, lambda) members of the rule family."""

    SIMPSON = "simpson"
    TRAPEZOID = "trapezoid"
    MIDPOINT = "midpoint"

    @property
    def theta(self) -> float:
        return {"simpson": 2 / 3, "trapezoid": 0.0, "midpoint": 1.0}[self.value]

    @property
    def lam(self) -> float:
        return 0.5


def preset_rule(preset, m: float = 1.0, a: float = 0.0, b: float = 1.0) -> RuleParams:
    preset = Preset(preset)
    return RuleParams(preset.theta, preset.lam, m, a, b)


def _at(g: Callable, x: float) -> float:
    y = float(g(x))
    if not math.isfinite(y):
        raise EvaluationError(f"non-finite value at x={x!r}", x)
    return y


def rule_value(f: Callable, rp: RuleParams) -> float:
    """(1-theta)(lam f(ma) + (1-lam) f(mb)) + theta f(mC)."""
    m = rp.m
    ends = rp.lam * _at(f, m * rp.a) + (1 - rp.lam) * _at(f, m * rp.b)
    return (1 - rp.theta) * ends + rp.theta * _at(f, m * rp.c)


def defect(f: Callable, rp: RuleParams, tol: float = DEFAULT_TOL) -> float:
    """Signed rule value minus the mean of f over [ma, mb].

    The mean is computed to absolute accuracy ``tol``.
    """
    width = rp.width
    integral = integrate(f, rp.m * rp.a, rp.m * rp.b, tol * width).value
    return rule_value(f, rp) - integral / width


def _derivative_powers(fprime: Callable, rp: RuleParams, q: float) -> dict:
    m = rp.m
    points = {
        "ma": m * rp.a,
        "mb": m * rp.b,
        "mc": m * rp.c,
        "a": rp.a,
        "b": rp.b,
        "c": rp.c,
    }
    return {k: abs(_at(fprime, x)) ** q for k, x in points.items()}


def _check_q(rp: RuleParams, cp: ConvexityParams) -> None:
    # the bounds are stated for one m shared by the rule and the convexity class
    if rp.m != cp.m:
        raise ParameterError("m", f"rule m={rp.m} differs from convexity m={cp.m}")


def b_pair_powermean(fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> tuple[float, float]:
    """The two branch values B1 (A2/A3 weights) and B2 (A4/A5 weights)."""
    _check_q(rp, cp)
    q, m, lam = cp.q, cp.m, rp.lam
    w = co.weight_moments(rp.theta, cp.alpha)
    d = _derivative_powers(fprime, rp, q)
    b1 = (
        lam**2 * (d["ma"] * w.a2 + m * d["c"] * w.a3) ** (1 / q)
        + (1 - lam) ** 2 * (d["mb"] * w.a2 + m * d["c"] * w.a3) ** (1 / q)
    )
    b2 = (
        lam**2 * (d["mc"] * w.a4 + m * d["a"] * w.a5) ** (1 / q)
        + (1 - lam) ** 2 * (d["mc"] * w.a4 + m * d["b"] * w.a5) ** (1 / q)
    )
    return b1, b2


def powermean_prefactor(rp: RuleParams, cp: ConvexityParams) -> float:
    """m(b-a) * A1(theta)^(1-1/q); the A1 factor is exactly 1 when q == 1."""
    if cp.q == 1:
        return rp.width
    return rp.width * co.a1(rp.theta) ** (1 - 1 / cp.q)


def bound_powermean(fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> float:
    return powermean_prefactor(rp, cp) * min(b_pair_powermean(fprime, rp, cp))


def _holder_q(cp: ConvexityParams) -> None:
    if cp.p is None:
        raise ParameterError("q", "Holder route requires q > 1")


def b_pair_holder(fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> tuple[float, float]:
    """B3 from E1, E2 (endpoints ma, mb; companion C) and B4 from E3, E4 (endpoint mC; companions a, b)."""
    _holder_q(cp)
    _check_q(rp, cp)
    q, m, alpha, lam = cp.q, cp.m, cp.alpha, rp.lam
    d = _derivative_powers(fprime, rp, q)
    e1 = co.e_coeff(d["ma"], d["c"], alpha, m)
    e2 = co.e_coeff(d["mb"], d["c"], alpha, m)
    e3 = co.e_coeff(d["mc"], d["a"], alpha, m)
    e4 = co.e_coeff(d["mc"], d["b"], alpha, m)
    b3 = lam**2 * e1 ** (1 / q) + (1 - lam) ** 2 * e2 ** (1 / q)
    b4 = lam**2 * e3 ** (1 / q) + (1 - lam) ** 2 * e4 ** (1 / q)
    return b3, b4


def holder_prefactor(rp: RuleParams, cp: ConvexityParams) -> float:
    """m(b-a) * ((theta^(p+1) + (1-theta)^(p+1)) / (p+1))^(1/p)."""
    _holder_q(cp)
    return rp.width * co.holder_factor(rp.theta, cp.p) ** (1 / cp.p)


def bound_holder(fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> float:
    return holder_prefactor(rp, cp) * min(b_pair_holder(fprime, rp, cp))


def _argmin(first: float, second: float, names: tuple[str, str]) -> str:
    if math.isclose(first, second, rel_tol=1e-12, abs_tol=0.0):
        return "tie"
    return names[0] if first < second else names[1]


def bound_report(
    f: Callable,
    fprime: Callable,
    rp: RuleParams,
    cp: ConvexityParams,
    tol: float = DEFAULT_TOL,
    defect_value: float | None = None,
) -> BoundReport:
    """Defect plus both bounds; the Holder fields stay None when q == 1.

    ``defect_value`` lets sweep code reuse a defect computed for another cell.
    """
    d = defect(f, rp, tol) if defect_value is None else defect_value
    b1, b2 = b_pair_powermean(fprime, rp, cp)
    pm = powermean_prefactor(rp, cp) * min(b1, b2)
    b3 = b4 = bh = h_arg = None
    if cp.p is not None:
        b3, b4 = b_pair_holder(fprime, rp, cp)
        bh = holder_prefactor(rp, cp) * min(b3, b4)
        h_arg = _argmin(b3, b4, ("b3", "b4"))
    return BoundReport(
        defect=d,
        bound_powermean=pm,
        b1=b1,
        b2=b2,
        pm_argmin=_argmin(b1, b2, ("b1", "b2")),
        bound_holder=bh,
        b3=b3,
        b4=b4,
        h_argmin=h_arg,
    )


# A1(theta) at the presets, as printed in the closed-form special cases
_PRESET_A1 = {Preset.SIMPSON: 5 / 18, Preset.TRAPEZOID: 0.5, Preset.MIDPOINT: 0.5}


def _preset_args(preset, rp: RuleParams) -> Preset:
    preset = Preset(preset)
    if not (math.isclose(rp.theta, preset.theta, abs_tol=1e-15) and rp.lam == 0.5):
        raise ParameterError("theta", f"rule is not the {preset.value} preset")
    return preset


def preset_powermean_bound(preset, fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> float:
    """m(b-a) * c^(1-1/q) * min(B1, B2) with the preset constant c (5/18 or 1/2)."""
    preset = _preset_args(preset, rp)
    return rp.width * _PRESET_A1[preset] ** (1 - 1 / cp.q) * min(b_pair_powermean(fprime, rp, cp))


def preset_holder_prefactor(preset, rp: RuleParams, cp: ConvexityParams) -> float:
    """Holder prefactor with lambda^2 = 1/4 pulled out.

    simpson:            (m(b-a)/12) * ((2^(p+1) + 1) / (3(p+1)))^(1/p)
    trapezoid/midpoint: (m(b-a)/4) * (1/(p+1))^(1/p)
    """
    preset = _preset_args(preset, rp)
    _holder_q(cp)
    p = cp.p
    if preset is Preset.SIMPSON:
        return rp.width / 12 * ((2 ** (p + 1) + 1) / (3 * (p + 1))) ** (1 / p)
    return rp.width / 4 * (1 / (p + 1)) ** (1 / p)


def preset_holder_prefactor_text(preset) -> str:
    if Preset(preset) is Preset.SIMPSON:
        return "(m(b-a)/12)*((2^(p+1)+1)/(3(p+1)))^(1/p)"
    return "(m(b-a)/4)*(1/(p+1))^(1/p)"


def preset_holder_bound(preset, fprime: Callable, rp: RuleParams, cp: ConvexityParams) -> float:
    """Prefactor times min(E1^(1/q) + E2^(1/q), E3^(1/q) + E4^(1/q)) at lambda = 1/2."""
    prefactor = preset_holder_prefactor(preset, rp, cp)
    q, m, alpha = cp.q, cp.m, cp.alpha
    d = _derivative_powers(fprime, rp, q)
    e1 = co.e_coeff(d["ma"], d["c"], alpha, m)
    e2 = co.e_coeff(d["mb"], d["c"], alpha, m)
    e3 = co.e_coeff(d["mc"], d["a"], alpha, m)
    e4 = co.e_coeff(d["mc"], d["b"], alpha, m)
    return prefactor * min(e1 ** (1 / q) + e2 ** (1 / q), e3 ** (1 / q) + e4 ** (1 / q))


def simpson_compact_bound(fprime: Callable, a: float, b: float, q: float) -> float:
    """Simpson bound for ordinary convex |f'|^q (alpha = m = 1), B2 branch, weights pulled inside.

    (b-a) * (5/72)^(1-1/q) * [ (29/648 |f'(mid)|^q + 2/81 |f'(a)|^q)^(1/q)
                             + (29/648 |f'(mid)|^q + 2/81 |f'(b)|^q)^(1/q) ]
    """
    if not a < b:
        raise ParameterError("b", "a < b required")
    if q < 1:
        raise ParameterError("q", "q must be >= 1")
    mid = abs(_at(fprime, 0.5 * (a + b))) ** q
    left = abs(_at(fprime, a)) ** q
    right = abs(_at(fprime, b)) ** q
    inner = (29 / 648 * mid + 2 / 81 * left) ** (1 / q) + (29 / 648 * mid + 2 / 81 * right) ** (1 / q)
    return (b - a) * (5 / 72) ** (1 - 1 / q) * inner


def hermite_hadamard(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL) -> tuple[float, float, float]:
    """(f((a+b)/2), mean of f over [a, b], (f(a)+f(b))/2).

    The ordering lhs <= mid <= rhs holds for convex f; nothing is asserted here.
    """
    if not a < b:
        raise ParameterError("b", "a < b required")
    mean = integrate(f, a, b, tol * (b - a)).value / (b - a)
    return _at(f, 0.5 * (a + b)), mean, 0.5 * (_at(f, a) + _at(f, b))


def classical_simpson_bound(f4_sup: float, a: float, b: float) -> float:
    """sup|f''''| * (b-a)^4 / 2880, bounding |Simpson average - mean of f| on [a, b]."""
    if f4_sup < 0:
        raise ParameterError("f4_sup", "f4_sup must be >= 0")
    if not a < b:
        raise ParameterError("b", "a < b required")
    return f4_sup * (b - a) ** 4 / 2880
