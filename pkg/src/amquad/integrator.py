"""Reference integration oracle and the integral form of the rule defect.

``integrate`` is a globally adaptive Gauss-Kronrod (7/15) bisection scheme.
The Kronrod value is reported; ``|K15 - G7|`` summed over panels is the error
estimate, which is deliberately pessimistic.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .model import EvaluationError, ParameterError, RuleParams

__all__ = [
    "QuadResult",
    "NonConvergenceError",
    "sample",
    "integrate",
    "lemma_rhs",
    "lemma_residual",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10
MAX_DEPTH = 60
MAX_PANELS = 20000

# QUADPACK qk15 abscissae (positive half, descending) and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node layout: x = [-xgk[0..6], 0, xgk[6..0]]
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_WK = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[[13, 11, 9]] = _WG[:3]


class NonConvergenceError(ArithmeticError):
    """Raised when a panel would need splitting past the depth or panel limit."""

    def __init__(self, message: str, result: "QuadResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_error: float
    evaluations: int
    converged: bool


def sample(g: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate ``g`` on an array, falling back to one call per point for scalar-only callables.

    Raises EvaluationError at the first non-finite sample.
    """
    try:
        ys = np.asarray(g(xs), dtype=float)
        if ys.shape != xs.shape:
            if ys.ndim != 0:
                raise ValueError("shape mismatch")
            ys = np.full(xs.shape, float(ys))
    except (TypeError, ValueError):
        ys = np.array([float(g(float(x))) for x in xs.ravel()]).reshape(xs.shape)
    bad = ~np.isfinite(ys)
    if bad.any():
        x = float(xs[bad].flat[0])
        raise EvaluationError(f"integrand is not finite at x={x!r}", x)
    return ys


def _panel(g, lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    centre = 0.5 * (hi + lo)
    ys = sample(g, centre + half * _NODES)
    kronrod = half * float(np.dot(_WK, ys))
    gauss = half * float(np.dot(_WG15, ys))
    return kronrod, abs(kronrod - gauss)


def integrate(
    g: Callable,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    points: Iterable[float] = (),
    max_depth: int = MAX_DEPTH,
) -> QuadResult:
    """Integrate ``g`` over [lo, hi] to absolute tolerance ``tol``.

    ``points`` are mandatory breakpoints (kinks, sign changes of a kernel);
    those strictly inside (lo, hi) seed the initial panels.

    Raises NonConvergenceError (carrying the best estimate) if the tolerance
    is not reached within ``max_depth`` bisections of any panel, and
    EvaluationError for a non-finite sample.
    """
    if not tol > 0:
        raise ParameterError("tol", "tol must be > 0")
    if not lo < hi:
        raise ParameterError("hi", "lo < hi required")
    edges = [lo, *sorted({float(p) for p in points if lo < p < hi}), hi]

    heap = []
    panels = {}
    for k, (left, right) in enumerate(zip(edges[:-1], edges[1:])):
        value, err = _panel(g, left, right)
        panels[(left, right)] = (value, err)
        heapq.heappush(heap, (-err, k, left, right, 0))
    counter = len(heap)
    evaluations = 15 * counter

    def result(converged: bool) -> QuadResult:
        ordered = sorted(panels.items())
        value = math.fsum(v for _, (v, _) in ordered)
        err = math.fsum(e for _, (_, e) in ordered)
        return QuadResult(value, err, evaluations, converged)

    total = math.fsum(e for _, e in panels.values())
    while total > tol:
        neg_err, _, left, right, depth = heapq.heappop(heap)
        if depth >= max_depth or len(panels) >= MAX_PANELS:
            heapq.heappush(heap, (neg_err, -1, left, right, depth))
            best = result(False)
            raise NonConvergenceError(
                f"no convergence on [{lo}, {hi}]: estimated error {best.est_error:.3g} > {tol:.3g}",
                best,
            )
        del panels[(left, right)]
        mid = 0.5 * (left + right)
        for a, b in ((left, mid), (mid, right)):
            value, err = _panel(g, a, b)
            panels[(a, b)] = (value, err)
            heapq.heappush(heap, (-err, counter, a, b, depth + 1))
            counter += 1
        evaluations += 30
        total = math.fsum(e for _, e in panels.values())
    return result(True)


def lemma_rhs(fprime: Callable, rp: RuleParams, tol: float = DEFAULT_TOL) -> float:
    """Integral representation of the rule defect.

    m(b-a) * [ -lam^2   * int_0^1 (t - theta) f'(t*ma + (1-t)*mC) dt
               + (1-lam)^2 * int_0^1 (t - theta) f'(t*mb + (1-t)*mC) dt ]
    """
    m, theta, lam = rp.m, rp.theta, rp.lam
    ma, mb, mc = m * rp.a, m * rp.b, m * rp.c

    def left(t):
        return (t - theta) * fprime(t * ma + (1 - t) * mc)

    def right(t):
        return (t - theta) * fprime(t * mb + (1 - t) * mc)

    i_left = integrate(left, 0.0, 1.0, tol, points=(theta,)).value
    i_right = integrate(right, 0.0, 1.0, tol, points=(theta,)).value
    return rp.width * (-(lam**2) * i_left + (1 - lam) ** 2 * i_right)


def lemma_residual(f: Callable, fprime: Callable, rp: RuleParams, tol: float = DEFAULT_TOL) -> float:
    """|defect - lemma_rhs|; small values confirm the integral identity for this f."""
    from .bounds import defect

    return abs(defect(f, rp, tol) - lemma_rhs(fprime, rp, tol))
