import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amquad.expr import compile_expr
from amquad.integrator import NonConvergenceError, integrate, lemma_residual, lemma_rhs
from amquad.model import EvaluationError, ParameterError, RuleParams


class TestIntegrate:
    def test_polynomial(self):
        r = integrate(lambda x: x**2, 0, 1, 1e-10)
        assert r.converged
        assert abs(r.value - 1 / 3) <= 1e-10
        assert r.est_error <= 1e-10

    def test_exp(self):
        assert abs(integrate(np.exp, 0, 1, 1e-10).value - (math.e - 1)) <= 1e-10

    def test_kinked_kernel(self):
        r = integrate(lambda t: np.abs(t - 2 / 3) * t, 0, 1, 1e-10, points=(2 / 3,))
        assert abs(r.value - 8 / 81) <= 1e-10

    def test_breakpoint_removes_kink(self):
        with_split = integrate(lambda t: np.abs(t - 0.3), 0, 1, 1e-12, points=(0.3,))
        without = integrate(lambda t: np.abs(t - 0.3), 0, 1, 1e-12)
        assert with_split.evaluations == 30
        assert without.evaluations > with_split.evaluations
        assert with_split.value == pytest.approx(0.3**2 / 2 + 0.7**2 / 2, abs=1e-15)

    def test_endpoint_singular_derivative(self):
        r = integrate(lambda t: t**0.05, 0, 1, 1e-10)
        assert abs(r.value - 1 / 1.05) <= 1e-10

    def test_scalar_only_callable(self):
        assert integrate(math.exp, 0, 1).value == pytest.approx(math.e - 1, abs=1e-10)

    def test_constant_returning_callable(self):
        assert integrate(lambda x: 2.0, 0, 3).value == pytest.approx(6.0, abs=1e-12)

    def test_non_finite_sample(self):
        with pytest.raises(EvaluationError) as info:
            integrate(lambda x: np.where(x == 0.5, np.inf, x), 0, 1)
        assert info.value.x == 0.5

    def test_non_convergence_carries_estimate(self):
        with pytest.raises(NonConvergenceError) as info:
            integrate(lambda t: t**0.05, 0, 1, 1e-12, max_depth=3)
        best = info.value.result
        assert not best.converged
        assert best.value == pytest.approx(1 / 1.05, abs=1e-4)

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            integrate(np.exp, 1, 0)
        with pytest.raises(ParameterError):
            integrate(np.exp, 0, 1, tol=0)

    def test_deterministic(self):
        g = compile_expr("exp(-x^2) * abs(x - 1/3)^(1/2)")
        first = integrate(g, 0, 2, 1e-10, points=(1 / 3,))
        second = integrate(g, 0, 2, 1e-10, points=(1 / 3,))
        assert first.value.hex() == second.value.hex()
        assert first == second


FUNCS = {
    "poly": lambda x: 3 * x**5 - x + 2,
    "exp": np.exp,
    "root": lambda x: np.sqrt(x + 0.1),
    "kink": lambda x: np.abs(x - 0.4) * np.exp(x),
}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(FUNCS)), st.sampled_from([-1.0, 2.0, 10.0]))
def test_linearity(name, c):
    g = FUNCS[name]
    tol = 1e-10
    base = integrate(g, 0, 1, tol).value
    scaled = integrate(lambda x: c * g(x), 0, 1, tol).value
    assert abs(scaled - c * base) <= 10 * tol


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(FUNCS)), st.floats(0.05, 0.95))
def test_additivity(name, mid):
    g = FUNCS[name]
    tol = 1e-10
    whole = integrate(g, 0, 1, tol).value
    parts = integrate(g, 0, mid, tol).value + integrate(g, mid, 1, tol).value
    assert abs(whole - parts) <= 10 * tol


class TestLemma:
    def test_zero_derivative(self):
        assert lemma_rhs(lambda x: 0.0 * x, RuleParams(0.3, 0.4, 1, 0, 1)) == 0.0

    def test_trapezoid_square(self):
        # (f(0) + f(1))/2 - int_0^1 x^2 dx
        assert lemma_rhs(lambda x: 2 * x, RuleParams(0, 0.5, 1, 0, 1)) == pytest.approx(1 / 2 - 1 / 3, abs=1e-10)

    @pytest.mark.parametrize("theta", [0.0, 0.25, 2 / 3, 1.0])
    def test_constant_derivative_cancels(self, theta):
        assert abs(lemma_rhs(lambda x: np.ones_like(x), RuleParams(theta, 0.5, 1, 0, 1))) <= 1e-12

    def test_sign_of_left_term(self):
        # lambda = 1 keeps only the left integral: -m(b-a) * int (t - theta) f'(...) dt
        rp = RuleParams(0.0, 1.0, 1, 0, 1)
        # f = x^2: rule is f(ma) = 0, mean is 1/3
        assert lemma_rhs(lambda x: 2 * x, rp) == pytest.approx(-1 / 3, abs=1e-10)

    def test_residual_cubic_simpson(self):
        f, fp = compile_expr("x^3"), compile_expr("3*x^2")
        assert lemma_residual(f, fp, RuleParams(2 / 3, 0.5, 1, 0, 1)) <= 1e-8

    def test_residual_exp_scaled(self):
        f = compile_expr("exp(x)")
        assert lemma_residual(f, f, RuleParams(1, 0.5, 0.5, 0, 2)) <= 1e-8

    def test_residual_constant(self):
        assert lemma_residual(lambda x: 0 * x + 4.0, lambda x: 0 * x, RuleParams(0.3, 0.7, 0.5, 0.2, 1.5)) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0.05, 1), st.floats(0, 1.5), st.floats(0.1, 1.5))
    def test_residual_random_rules(self, theta, lam, m, a, width):
        f, fp = compile_expr("exp(x) * x^2"), compile_expr("exp(x) * (x^2 + 2*x)")
        assert lemma_residual(f, fp, RuleParams(theta, lam, m, a, a + width)) <= 1e-8
