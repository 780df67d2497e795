"""Legendre spectral Galerkin solver for fractional advection-dispersion
equations

    d^alpha u / dt^alpha = -nu d^beta u / dx^beta + k d^gamma u / dx^gamma + f(x, t)

on the unit interval with u(x, 0) = g(x), for 0 < alpha, beta <= 1 and
0 < gamma <= 2.  The unknown is expanded in orthonormal Legendre scaling
functions; exact fractional calculus on the monomial forms reduces the
problem to a constant-coefficient fractional ODE system that is propagated
by matrix exponentials (alpha = 1) or Mittag-Leffler series (alpha < 1).

Typical use:

    >>> from fade import ProblemSpec, solve
    >>> spec = ProblemSpec(alpha=1.0, beta=1.0, gamma=2.0, nu=1.0, k=1.0,
    ...                    g="x^2", n=4, f="2*t + 2*x - 2")
    >>> u = solve(spec)
    >>> round(u(0.5, 0.5), 10)
    0.5
"""

from .analysis import (
    ConvergenceRow,
    ConvergenceTable,
    ErrorReport,
    convergence_study,
    empirical_truncation,
    error_report,
    function_l2_norm,
    manufacture_source,
    residual_norm,
    second_derivative_bound,
    smooth_bump,
    truncation_bound,
    weak_asymptotic_pairing,
)
from .assembly import (
    GalerkinSystem,
    assemble,
    derivative_matrix,
    dispersion_matrix,
    source_coefficients,
    system_matrix,
)
from .basis import (
    BASIS_CAP,
    BasisSet,
    CoefficientVector,
    build_basis,
    evaluate_basis,
    project,
    synthesize,
)
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    FadeError,
    ParseError,
    QuadratureError,
    SeriesConvergenceError,
)
from .expressions import (
    Classification,
    Expression,
    MonomialSum,
    classify,
    evaluate,
    parse,
)
from .fractional import (
    GeneralizedPolynomial,
    caputo_derivative,
    gamma,
    integrate_01,
    rl_integral,
)
from .presets import PresetRun, example_problem
from .propagators import (
    Propagator,
    SeriesInfo,
    alpha_exponential,
    convolve_source,
    matrix_exponential,
    mittag_leffler_propagator,
    propagate_homogeneous,
)
from .solver import (
    ProblemSpec,
    Solution,
    evaluate_solution,
    initial_coefficients,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BASIS_CAP",
    "BasisSet",
    "Classification",
    "CoefficientVector",
    "ConfigError",
    "ConvergenceRow",
    "ConvergenceTable",
    "DomainError",
    "ErrorReport",
    "EvaluationError",
    "Expression",
    "FadeError",
    "GalerkinSystem",
    "GeneralizedPolynomial",
    "MonomialSum",
    "ParseError",
    "PresetRun",
    "ProblemSpec",
    "Propagator",
    "QuadratureError",
    "SeriesConvergenceError",
    "SeriesInfo",
    "Solution",
    "alpha_exponential",
    "assemble",
    "build_basis",
    "caputo_derivative",
    "classify",
    "convergence_study",
    "convolve_source",
    "derivative_matrix",
    "dispersion_matrix",
    "empirical_truncation",
    "error_report",
    "evaluate",
    "evaluate_basis",
    "evaluate_solution",
    "example_problem",
    "function_l2_norm",
    "gamma",
    "initial_coefficients",
    "integrate_01",
    "manufacture_source",
    "matrix_exponential",
    "mittag_leffler_propagator",
    "parse",
    "project",
    "propagate_homogeneous",
    "residual_norm",
    "rl_integral",
    "second_derivative_bound",
    "smooth_bump",
    "solve",
    "source_coefficients",
    "synthesize",
    "system_matrix",
    "truncation_bound",
    "weak_asymptotic_pairing",
]
