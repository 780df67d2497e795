"""Quantitative verification: truncation bounds, residuals, error reports.

The central objects are the truncation-tail bound for twice-differentiable
functions, the Galerkin residual

    eps_n = nu * (D^beta u_n - S_n D^beta u_n) + k * (S_n D^gamma u_n - D^gamma u_n),

its weak pairings against compactly supported test functions, and the
manufactured-source generator used to build exact solutions for fractional
order variants.  The residual is assembled symbolically in mpmath because
its monomial coefficients cancel far below double precision; everything
returned to the caller is an ordinary float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import mpmath as mp
import numpy as np

from .assembly import MP_DPS, _caputo_basis_mp, _raw_matrix_mp
from .basis import _eval_on, _mp_functions, build_basis, project, synthesize
from .errors import DomainError, FadeError, QuadratureError
from .expressions import Expression, MonomialSum, classify, parse
from .fractional import GeneralizedPolynomial, caputo_derivative, integrate_01
from .quadrature import gauss_legendre_01
from .solver import ProblemSpec, Solution, solve

#: Terms summed explicitly in the truncation tail before the integral remainder.
TAIL_TERMS = 10_000

#: Grid used for L-infinity columns when no grid is supplied.
DEFAULT_X_POINTS = 201


# -- truncation bound ---------------------------------------------------------

def truncation_bound(K: float, n: int) -> float:
    """Upper bound for || f - S_n f ||_L2^2 when |f''| <= K on [0, 1].

    S_n keeps the basis functions of index < n.  The bound is
    (3 K^2 / 8) * sum_{i >= n} (2i - 3)^(-4), with the tail summed explicitly
    to ``TAIL_TERMS`` terms plus a midpoint integral remainder; the proof
    chain requires n >= 2.
    """
    if n < 2:
        raise DomainError(f"the tail bound requires n >= 2, got {n}")
    if K < 0:
        raise DomainError(f"the derivative bound K must be >= 0, got {K!r}")
    last = n + TAIL_TERMS
    partial = math.fsum((2 * i - 3) ** -4.0 for i in range(last, n - 1, -1))
    remainder = (2 * last - 2) ** -3.0 / 6.0
    return 0.375 * K * K * (partial + remainder)


def empirical_truncation(f, n: int) -> float:
    """|| f - S_n f ||_L2^2 measured by quadrature of the squared residual.

    Reference coefficients are computed to index n + 20 (so the basis cap
    limits n to 12); two quadrature refinement levels must agree.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    f_eval = _as_evaluable_x(f)
    coeffs = project(f_eval, n + 20).values
    kept = coeffs[:n]

    def resid(x):
        fx = _eval_on(f_eval, np.atleast_1d(np.asarray(x, dtype=float)))
        if n == 0:
            return fx
        return fx - np.atleast_1d(synthesize(kept, x))

    coarse = _l2_squared(resid, 128)
    fine = _l2_squared(resid, 256)
    if abs(coarse - fine) > 1e-10 * max(1.0, abs(fine)):
        raise QuadratureError(
            f"truncation quadrature levels disagree: {coarse!r} vs {fine!r}")
    return fine


def _l2_squared(f, nodes: int) -> float:
    x, w = gauss_legendre_01(nodes)
    vals = _eval_on(f, x)
    return float(np.sum(w * vals * vals))


def function_l2_norm(f, nodes: int = 128) -> float:
    """L2 norm over [0, 1] of an evaluable function."""
    return math.sqrt(_l2_squared(f, nodes))


def _as_evaluable_x(f):
    if isinstance(f, str):
        f = parse(f)
    if isinstance(f, Expression):
        expr = f
        return lambda x: expr(x, 0.0)
    if isinstance(f, GeneralizedPolynomial):
        return f
    if callable(f):
        return f
    raise DomainError(f"cannot evaluate {f!r} on [0, 1]")


# -- Galerkin residual --------------------------------------------------------

def _residual_poly_mp(sol: Solution, t: float) -> GeneralizedPolynomial:
    """eps_n(., t) as a generalized polynomial with mpmath coefficients."""
    sys = sol.system
    n = sys.n
    with mp.workdps(MP_DPS):
        c = [mp.mpf(float(v)) for v in sol.coefficients(t).values]
        phis = _mp_functions(n, MP_DPS)
        d_beta = _caputo_basis_mp(n, float(sys.beta))
        d_gamma = _caputo_basis_mp(n, float(sys.gamma))
        a = _raw_matrix_mp(n, float(sys.beta))
        b = _raw_matrix_mp(n, float(sys.gamma))

        eps = GeneralizedPolynomial.zero("x")
        for i in range(n + 1):
            if c[i] == 0:
                continue
            eps = eps + (sys.nu * c[i]) * d_beta[i] + (-sys.k * c[i]) * d_gamma[i]
        for j in range(n + 1):
            proj_beta = mp.fsum(c[i] * a[i][j] for i in range(n + 1))
            proj_gamma = mp.fsum(c[i] * b[i][j] for i in range(n + 1))
            coeff = -sys.nu * proj_beta + sys.k * proj_gamma
            if coeff != 0:
                eps = eps + coeff * phis[j]
        return eps


def residual_norm(sol: Solution, t: float) -> float:
    """L2 norm of eps_n(., t), computed from the exact symbolic residual."""
    eps = _residual_poly_mp(sol, t)
    if eps.is_zero:
        return 0.0
    with mp.workdps(MP_DPS):
        return float(mp.sqrt(abs(integrate_01(eps * eps))))


def weak_asymptotic_pairing(sol: Solution, test, t: float) -> float:
    """integral of eps_n(x, t) * test(x) over [0, 1] by quadrature.

    The test function must be smooth with compact support inside (0, 1);
    the Schwarz bound |pairing| <= residual_norm * ||test|| then applies.
    """
    eps = _residual_poly_mp(sol, t)
    if eps.is_zero:
        return 0.0
    with mp.workdps(MP_DPS):
        def integrand(xs):
            tv = _eval_on(test, xs)
            ev = np.array([float(eps(mp.mpf(float(x)))) for x in xs])
            return tv * ev

        x64, w64 = gauss_legendre_01(64)
        x128, w128 = gauss_legendre_01(128)
        coarse = float(np.sum(w64 * integrand(x64)))
        fine = float(np.sum(w128 * integrand(x128)))
    if abs(coarse - fine) > 1e-10 * max(1.0, abs(fine)):
        raise QuadratureError(
            f"pairing quadrature levels disagree: {coarse!r} vs {fine!r}")
    return fine


def smooth_bump(x, support: tuple[float, float] = (0.1, 0.9)):
    """C-infinity bump supported on (a, b), peak value 1 at the midpoint."""
    a, b = support
    if not 0.0 <= a < b <= 1.0:
        raise DomainError(f"bump support must satisfy 0 <= a < b <= 1, got {support}")
    arr = np.asarray(x, dtype=float)
    y = (2.0 * arr - a - b) / (b - a)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inside = np.abs(y) < 1.0
        vals = np.where(inside, np.exp(1.0 - 1.0 / np.maximum(1.0 - y * y, 1e-300)), 0.0)
    return float(vals) if arr.ndim == 0 else vals


def second_derivative_bound(sol: Solution, t: float, samples: int = 2001) -> float:
    """Dense-sampled max of |d^2/dx^2 D^beta u_n| and |d^2/dx^2 D^gamma u_n|.

    For non-integer orders these second derivatives are singular at x = 0,
    so the estimate can legitimately be huge or infinite; it is an a
    posteriori stand-in for an assumed uniform bound.
    """
    sys = sol.system
    n = sys.n
    xs = np.linspace(0.0, 1.0, samples)
    c = sol.coefficients(t).values
    worst = 0.0
    for order in (sys.beta, sys.gamma):
        d_basis = _caputo_basis_mp(n, float(order))
        terms: list[tuple[float, float]] = []
        for ci, dphi in zip(c, d_basis):
            for coeff, e in dphi.terms:
                terms.append((float(ci) * float(coeff), float(e)))
        vals = np.zeros_like(xs)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for coeff, e in terms:
                factor = coeff * e * (e - 1.0)
                if factor == 0.0:
                    continue
                vals = vals + factor * np.power(xs, e - 2.0)
        finite_max = float(np.max(np.abs(vals[np.isfinite(vals)]))) if np.any(
            np.isfinite(vals)) else 0.0
        if np.any(~np.isfinite(vals)):
            return math.inf
        worst = max(worst, finite_max)
    return worst


# -- manufactured solutions ---------------------------------------------------

def manufacture_source(u, alpha: float, beta: float, gamma: float,
                       nu: float, k: float) -> MonomialSum:
    """Forcing f = D_t^alpha u + nu D_x^beta u - k D_x^gamma u for a target u.

    ``u`` must normalize to a finite sum of c * x**p * t**q terms whose
    exponents are admissible for the Caputo rules in both variables.
    """
    monomials = _as_monomials(u)
    out: list[tuple[float, float, float]] = []
    for c, p, q in monomials.terms:
        tpart = caputo_derivative(
            GeneralizedPolynomial.monomial(1.0, q, "t"), alpha)
        for rc, re in tpart.terms:
            out.append((c * float(rc), p, float(re)))
        xbeta = caputo_derivative(
            GeneralizedPolynomial.monomial(1.0, p, "x"), beta)
        for rc, re in xbeta.terms:
            out.append((nu * c * float(rc), float(re), q))
        xgamma = caputo_derivative(
            GeneralizedPolynomial.monomial(1.0, p, "x"), gamma)
        for rc, re in xgamma.terms:
            out.append((-k * c * float(rc), float(re), q))
    return MonomialSum.from_terms(out)


def _as_monomials(u) -> MonomialSum:
    if isinstance(u, MonomialSum):
        return u
    if isinstance(u, str):
        u = parse(u)
    if isinstance(u, Expression):
        cls = classify(u)
        if cls.kind != "monomial-sum":
            raise DomainError(
                "manufactured solutions must be finite sums of x**p * t**q terms")
        return cls.monomials
    if isinstance(u, GeneralizedPolynomial):
        if u.var == "x":
            return MonomialSum.from_terms(
                (float(c), float(e), 0.0) for c, e in u.terms)
        return MonomialSum.from_terms(
            (float(c), 0.0, float(e)) for c, e in u.terms)
    raise DomainError(f"cannot interpret exact solution {u!r}")


# -- error reports and convergence studies ------------------------------------

@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Pointwise and per-time-level errors of a solution on a grid."""

    xs: np.ndarray
    ts: np.ndarray
    u_numeric: np.ndarray               # shape (len(ts), len(xs))
    u_exact: np.ndarray | None
    abs_error: np.ndarray | None
    linf: np.ndarray | None             # per time level
    l2: np.ndarray | None               # per time level
    n: int
    metadata: dict

    @property
    def has_exact(self) -> bool:
        return self.u_exact is not None


def _exact_callable(exact):
    if exact is None:
        return None
    if isinstance(exact, str):
        exact = parse(exact)
    if isinstance(exact, (Expression, MonomialSum)):
        obj = exact
        return lambda x, t: obj(x, t)
    if callable(exact):
        return exact
    raise DomainError(f"cannot evaluate exact solution {exact!r}")


def error_report(sol: Solution, exact, x_grid, t_grid) -> ErrorReport:
    """|u_n - exact| on the grid plus per-time L-infinity and L2 norms."""
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if xs.size == 0 or ts.size == 0:
        raise DomainError("error report grids must be nonempty")
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("x grid must lie within [0, 1]")
    exact_fn = _exact_callable(exact)

    u_num = np.vstack([
        np.atleast_1d(synthesize(sol.coefficients(t), xs)) for t in ts])
    if exact_fn is None:
        return ErrorReport(xs=xs, ts=ts, u_numeric=u_num, u_exact=None,
                           abs_error=None, linf=None, l2=None,
                           n=sol.n, metadata=sol.metadata)

    u_ex = np.vstack([
        _eval_on(lambda x, _t=t: _scalar_exact(exact_fn, x, _t), xs) for t in ts])
    err = np.abs(u_num - u_ex)
    linf = err.max(axis=1)
    qx, qw = gauss_legendre_01(64)
    l2 = np.empty(ts.size)
    for row, t in enumerate(ts):
        diff = np.atleast_1d(synthesize(sol.coefficients(t), qx)) - _eval_on(
            lambda x, _t=t: _scalar_exact(exact_fn, x, _t), qx)
        l2[row] = math.sqrt(max(float(np.sum(qw * diff * diff)), 0.0))
    return ErrorReport(xs=xs, ts=ts, u_numeric=u_num, u_exact=u_ex,
                       abs_error=err, linf=linf, l2=l2,
                       n=sol.n, metadata=sol.metadata)


def _scalar_exact(fn, x, t):
    val = fn(x, t)
    arr = np.asarray(val, dtype=float)
    return arr if arr.shape else float(arr)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    t: float
    linf: float
    l2: float
    residual: float
    bound: float


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    failures: tuple[tuple[int, float | None, str], ...]


def convergence_study(spec: ProblemSpec, n_list, t_list, exact=None,
                      K: float | None = None,
                      x_points: int = DEFAULT_X_POINTS) -> ConvergenceTable:
    """Rows (n, t, linf, l2, residual, bound) over a basis-size sweep.

    Per-cell failures are recorded and the sweep continues; columns without
    data (no exact solution, or no K for the bound) are filled with nan.
    """
    xs = np.linspace(0.0, 1.0, x_points)
    rows: list[ConvergenceRow] = []
    failures: list[tuple[int, float | None, str]] = []
    for n in n_list:
        try:
            sol = solve(replace(spec, n=n))
        except (FadeError, OverflowError) as exc:
            failures.append((n, None, str(exc)))
            continue
        bound = float("nan")
        if K is not None and n >= 2:
            bound = truncation_bound(K, n)
        for t in t_list:
            try:
                report = error_report(sol, exact, xs, [t])
                linf = float(report.linf[0]) if report.has_exact else float("nan")
                l2 = float(report.l2[0]) if report.has_exact else float("nan")
                resid = residual_norm(sol, t)
                rows.append(ConvergenceRow(
                    n=n, t=float(t), linf=linf, l2=l2,
                    residual=resid, bound=bound))
            except (FadeError, OverflowError) as exc:
                failures.append((n, float(t), str(exc)))
    return ConvergenceTable(tuple(rows), tuple(failures))
