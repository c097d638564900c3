"""Error bounds for the (theta, lambda) quadrature family under (alpha, m)-convexity."""
from .bounds import (
    Preset,
    bound_holder,
    bound_powermean,
    bound_report,
    classical_simpson_bound,
    defect,
    hermite_hadamard,
)
from .coefficients import a1, e_coeff, holder_factor, weight_moments
from .convexity import check_alpha_m_convex, classify
from .expr import compile_expr, eval_expr, parse
from .integrator import integrate, lemma_residual, lemma_rhs
from .model import (
    BoundReport,
    Certificate,
    ConvexityParams,
    EvaluationError,
    FunctionSpec,
    ParameterError,
    RuleParams,
    make_rule_params,
)

__version__ = "0.1.0"
