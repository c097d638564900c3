import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amquad.convexity import (
    ClassTag,
    ConvexClass,
    SamplingSpec,
    check_alpha_m_convex,
    classify,
    violation,
)
from amquad.expr import compile_expr
from amquad.model import EvaluationError, ParameterError


def test_linear_passes():
    cert = check_alpha_m_convex(lambda x: x, 1, 1, 1)
    assert cert.passed and cert.witness is None
    assert cert.samples_checked == 64**3 + 10_000


def test_concave_fails_near_chord_middle():
    g = lambda x: -(x**2)
    cert = check_alpha_m_convex(g, 1, 1, 1)
    assert not cert.passed
    x, y, t = cert.witness
    assert {x, y} == {0.0, 1.0}
    assert t == pytest.approx(0.5, abs=1 / 63)
    assert violation(g, 1, 1, x, y, t) > cert.slack
    assert violation(g, 1, 1, x, y, t) == pytest.approx(cert.worst_violation, rel=1e-12)


def test_square_with_half_m_regression():
    # frozen from the checker: (tx + (1-t)y/2)^2 <= t x^2 + (1-t) y^2 / 2 holds
    assert check_alpha_m_convex(lambda x: x**2, 1, 0.5, 1).passed


def test_power_not_alpha_convex_for_small_alpha():
    # x^2 fails (1/2, 1): near t = 0 the t^alpha weight grows faster than t
    cert = check_alpha_m_convex(lambda x: x**2, 0.5, 1, 1)
    assert not cert.passed
    assert violation(lambda x: x**2, 0.5, 1, *cert.witness) > cert.slack


@pytest.mark.parametrize("expr", ["x", "x^2", "x^3"])
def test_convex_powers_pass(expr):
    assert check_alpha_m_convex(compile_expr(expr), 1, 1, 1).passed


def test_scalar_only_function():
    import math

    assert check_alpha_m_convex(lambda x: math.exp(x), 1, 1, 1, SamplingSpec(n_grid=8, n_random=50)).passed


def test_non_finite_sample_raises():
    with pytest.raises(EvaluationError):
        check_alpha_m_convex(compile_expr("1/x"), 1, 1, 1)


def test_argument_ranges():
    with pytest.raises(ParameterError):
        check_alpha_m_convex(lambda x: x, 1.5, 1, 1)
    with pytest.raises(ParameterError):
        check_alpha_m_convex(lambda x: x, 1, 1, 0)
    # m == 0 is legitimate here
    assert check_alpha_m_convex(lambda x: x, 1, 0, 1).passed


def test_slack_scales_with_magnitude():
    big = check_alpha_m_convex(lambda x: 1e6 * x**2, 1, 1, 1)
    assert big.passed
    assert big.slack == pytest.approx(1e-3)


def test_deterministic_under_seed():
    g = compile_expr("abs(x - 0.3) - x^2 / 4")
    first = check_alpha_m_convex(g, 0.5, 0.5, 1, SamplingSpec(seed=11))
    assert first == check_alpha_m_convex(g, 0.5, 0.5, 1, SamplingSpec(seed=11))


FUNCS = ["x^2", "-x^2", "x^3 - x", "abs(x - 1/2)", "exp(x) - 2", "sqrt(x)", "x - x^3/3"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FUNCS), st.sampled_from([0.0, 0.5, 1.0]), st.sampled_from([0.0, 0.5, 1.0]), st.integers(3, 20))
def test_refining_grid_never_flips_fail_to_pass(expr, alpha, m, n):
    g = compile_expr(expr)
    coarse = check_alpha_m_convex(g, alpha, m, 1, SamplingSpec(n_grid=n, n_random=0))
    fine = check_alpha_m_convex(g, alpha, m, 1, SamplingSpec(n_grid=2 * n - 1, n_random=0))
    assert fine.worst_violation >= coarse.worst_violation
    assert not (fine.passed and not coarse.passed)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(FUNCS), st.sampled_from([0.25, 1.0]), st.sampled_from([0.0, 0.5, 1.0]))
def test_failed_witness_reproduces(expr, alpha, m):
    g = compile_expr(expr)
    cert = check_alpha_m_convex(g, alpha, m, 1, SamplingSpec(n_grid=16, n_random=500))
    if not cert.passed:
        assert violation(g, alpha, m, *cert.witness) > cert.slack


@pytest.mark.parametrize("expr", ["x^2", "exp(x)", "abs(x - 1/3)", "x^4 - x"])
def test_convex_certificate_implies_midpoint_convexity(expr):
    g = compile_expr(expr)
    cert = check_alpha_m_convex(g, 1, 1, 1)
    assert cert.passed
    xs = np.linspace(0, 1, 41)
    x, y = np.meshgrid(xs, xs)
    assert np.all(g((x + y) / 2) <= (g(x) + g(y)) / 2 + cert.slack)


class TestClassify:
    def test_square(self):
        cls = classify(lambda x: x**2, 1)
        assert ConvexClass.CONVEX in cls
        assert ConvexClass.STARSHAPED in cls
        assert ConvexClass.INCREASING in cls
        assert (1.0, 1.0) in cls.k_members

    def test_shifted_line(self):
        cls = classify(lambda x: x + 1, 1)
        assert ConvexClass.INCREASING in cls
        assert ConvexClass.CONVEX in cls
        assert ConvexClass.STARSHAPED not in cls
        assert cls.g0 == 1.0
        assert cls.k_members == ()

    def test_expm1(self):
        cls = classify(compile_expr("exp(x) - 1"), 1)
        assert ConvexClass.CONVEX in cls
        assert (1.0, 1.0) in cls.k_members

    def test_decreasing_not_increasing(self):
        cls = classify(lambda x: 1 - x, 1)
        assert ConvexClass.INCREASING not in cls
        assert ConvexClass.CONVEX in cls

    def test_taxonomy_pairs(self):
        cls = classify(lambda x: x**2, 1, alpha_probe=(0.5,), m_probe=(0.5,))
        pairs = {(t.kind, t.alpha, t.m) for t in cls.tags}
        assert (ConvexClass.INCREASING, 0.0, 0.0) in pairs
        assert (ConvexClass.STARSHAPED, 1.0, 0.0) in pairs
        assert (ConvexClass.M_CONVEX, 1.0, 0.5) in pairs
        assert (ConvexClass.CONVEX, 1.0, 1.0) in pairs
        assert str(ClassTag(ConvexClass.M_CONVEX, 1.0, 0.5)) == "m_convex(m=0.5)"
