"""Sampling checks of (alpha, m)-convexity and the classical class taxonomy.

A function g on [0, b] is (alpha, m)-convex when

    g(t*x + m*(1-t)*y) <= t^alpha * g(x) + m*(1 - t^alpha) * g(y)

for all x, y in [0, b] and t in [0, 1].  The checks here search for a
counterexample; a passing Certificate only records that none was found.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .integrator import sample
from .model import Certificate, ParameterError

__all__ = [
    "DEFAULT_SEED",
    "SamplingSpec",
    "ConvexClass",
    "ClassTag",
    "Classification",
    "check_alpha_m_convex",
    "violation",
    "classify",
]

DEFAULT_SEED = 0x5EED
SCALE_POINTS = 65


@dataclass(frozen=True)
class SamplingSpec:
    n_grid: int = 64
    n_random: int = 10_000
    seed: int = DEFAULT_SEED
    rel_slack: float = 1e-9


def _tpow(t, alpha: float):
    # 0**0 == 1 in numpy, which is the convention wanted for alpha == 0
    return np.power(t, alpha)


def violation(g: Callable, alpha: float, m: float, x: float, y: float, t: float) -> float:
    """lhs - rhs of the defining inequality at one triple (positive means violated)."""
    ta = float(_tpow(t, alpha))
    lhs = float(g(t * x + m * (1 - t) * y))
    return lhs - (ta * float(g(x)) + m * (1 - ta) * float(g(y)))


def _check_args(alpha: float, m: float, b: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError("alpha", "alpha must lie in [0,1]")
    if not 0.0 <= m <= 1.0:
        raise ParameterError("m", "m must lie in [0,1]")
    if not b > 0:
        raise ParameterError("b", "b must be > 0")


def check_alpha_m_convex(
    g: Callable,
    alpha: float,
    m: float,
    b: float,
    grid: Optional[SamplingSpec] = None,
) -> Certificate:
    """Search a deterministic x*y*t grid plus seeded random triples for a violation.

    ``m == 0`` is allowed here (starshaped-type classes).  The slack is
    ``rel_slack * max(1, max|g|)`` with max|g| taken over a fixed 65-point
    reference grid, so refining the sampling grid can only add evidence.
    """
    grid = grid or SamplingSpec()
    _check_args(alpha, m, b)
    if grid.n_grid < 2:
        raise ParameterError("n_grid", "n_grid must be >= 2")

    ref = b * np.arange(SCALE_POINTS) / (SCALE_POINTS - 1)
    slack = grid.rel_slack * max(1.0, float(np.max(np.abs(sample(g, ref)))))

    n = grid.n_grid
    pts = b * np.arange(n) / (n - 1)
    ts = np.arange(n) / (n - 1)
    gp = sample(g, pts)
    ta = _tpow(ts, alpha)

    # lhs[i, j, k] = g(t_k x_i + m (1 - t_k) y_j)
    args = ts[None, None, :] * pts[:, None, None] + m * (1 - ts)[None, None, :] * pts[None, :, None]
    lhs = sample(g, np.clip(args, 0.0, b))
    rhs = ta[None, None, :] * gp[:, None, None] + m * (1 - ta)[None, None, :] * gp[None, :, None]
    diff = lhs - rhs
    flat = int(np.argmax(diff))
    worst = float(diff.flat[flat])
    i, j, k = np.unravel_index(flat, diff.shape)
    witness = (float(pts[i]), float(pts[j]), float(ts[k]))

    checked = diff.size
    if grid.n_random > 0:
        rng = np.random.default_rng(grid.seed)
        xr = rng.uniform(0.0, b, grid.n_random)
        yr = rng.uniform(0.0, b, grid.n_random)
        tr = rng.uniform(0.0, 1.0, grid.n_random)
        tar = _tpow(tr, alpha)
        lhs_r = sample(g, np.clip(tr * xr + m * (1 - tr) * yr, 0.0, b))
        diff_r = lhs_r - (tar * sample(g, xr) + m * (1 - tar) * sample(g, yr))
        r = int(np.argmax(diff_r))
        if diff_r[r] > worst:
            worst = float(diff_r[r])
            witness = (float(xr[r]), float(yr[r]), float(tr[r]))
        checked += grid.n_random

    passed = worst <= slack
    return Certificate(passed, checked, worst, slack, None if passed else witness)


class ConvexClass(enum.Enum):
    INCREASING = "increasing"
    ALPHA_STARSHAPED = "alpha_starshaped"
    STARSHAPED = "starshaped"
    M_CONVEX = "m_convex"
    CONVEX = "convex"
    ALPHA_CONVEX = "alpha_convex"


@dataclass(frozen=True)
class ClassTag:
    kind: ConvexClass
    alpha: float
    m: float

    def __str__(self) -> str:
        if self.kind in (ConvexClass.ALPHA_STARSHAPED, ConvexClass.ALPHA_CONVEX):
            return f"{self.kind.value}(alpha={self.alpha:g})"
        if self.kind is ConvexClass.M_CONVEX:
            return f"{self.kind.value}(m={self.m:g})"
        return self.kind.value


@dataclass(frozen=True)
class Classification:
    tags: tuple
    # (alpha, m) pairs at which g passed and g(0) <= 0, i.e. membership in K_m^alpha(b)
    k_members: tuple
    g0: float

    def kinds(self) -> set:
        return {tag.kind for tag in self.tags}

    def __contains__(self, kind) -> bool:
        return kind in self.kinds()


def _taxonomy(alpha_probe: Iterable[float], m_probe: Iterable[float]) -> list[ClassTag]:
    points = [ClassTag(ConvexClass.INCREASING, 0.0, 0.0)]
    points += [ClassTag(ConvexClass.ALPHA_STARSHAPED, a, 0.0) for a in alpha_probe if 0 < a < 1]
    points.append(ClassTag(ConvexClass.STARSHAPED, 1.0, 0.0))
    points += [ClassTag(ConvexClass.M_CONVEX, 1.0, m) for m in m_probe if 0 < m < 1]
    points.append(ClassTag(ConvexClass.CONVEX, 1.0, 1.0))
    points += [ClassTag(ConvexClass.ALPHA_CONVEX, a, 1.0) for a in alpha_probe if 0 < a < 1]
    return points


def classify(
    g: Callable,
    b: float,
    alpha_probe: Iterable[float] = (0.25, 0.5, 0.75),
    m_probe: Iterable[float] = (0.25, 0.5, 0.75),
    grid: Optional[SamplingSpec] = None,
) -> Classification:
    """Check g at every taxonomy point and report the classes it was not refuted in."""
    alpha_probe, m_probe = tuple(alpha_probe), tuple(m_probe)
    g0 = float(sample(g, np.zeros(1))[0])
    tags, members = [], []
    for tag in _taxonomy(alpha_probe, m_probe):
        if check_alpha_m_convex(g, tag.alpha, tag.m, b, grid).passed:
            tags.append(tag)
            if g0 <= 0:
                members.append((tag.alpha, tag.m))
    return Classification(tuple(tags), tuple(members), g0)
