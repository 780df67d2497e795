"""Galerkin assembly: fractional derivative matrices and source projection.

The derivative matrices a_ij = <D^beta phi_i, phi_j> and
b_ij = <D^gamma phi_i, phi_j> are computed analytically: expand phi_i in
monomials, apply the Caputo rule, multiply by phi_j's monomials, integrate
term by term over [0, 1].  The double sums cancel by many orders of
magnitude as the degree grows, so the arithmetic runs in mpmath at
``MP_DPS`` digits and is rounded to double only at the end.  Quadrature
plays no role on this path; it survives only as an independent test oracle.

The coefficient system reads c^alpha(t) = M c(t) + r(t) with
M = (k*b - nu*a)^T.  The transpose is forced by comparing coefficients of
the same basis function on both sides of the projected equation; it is
backed by an executable orientation check in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath as mp
import numpy as np

from .basis import BasisSet, _mp_functions, build_basis, project
from .errors import DomainError
from .expressions import Classification, Expression, MonomialSum, classify
from .fractional import GeneralizedPolynomial, caputo_derivative, integrate_01

#: Working precision (decimal digits) for analytic assembly sums.
MP_DPS = 40


@lru_cache(maxsize=None)
def _caputo_basis_mp(n: int, order: float) -> tuple[GeneralizedPolynomial, ...]:
    """D^order phi_i for i = 0..n, with mpmath coefficients."""
    with mp.workdps(MP_DPS):
        phis = _mp_functions(n, MP_DPS)
        return tuple(caputo_derivative(phi, order) for phi in phis)


@lru_cache(maxsize=None)
def _raw_matrix_mp(n: int, order: float) -> tuple[tuple[mp.mpf, ...], ...]:
    """Exact entries <D^order phi_i, phi_j> as an (n+1) x (n+1) nested tuple."""
    with mp.workdps(MP_DPS):
        phis = _mp_functions(n, MP_DPS)
        dphis = _caputo_basis_mp(n, order)
        rows = []
        for dphi in dphis:
            if dphi.is_zero:
                rows.append(tuple(mp.mpf(0) for _ in range(n + 1)))
                continue
            rows.append(tuple(integrate_01(dphi * phi) for phi in phis))
        return tuple(rows)


def _raw_matrix(n: int, order: float) -> np.ndarray:
    rows = _raw_matrix_mp(n, order)
    out = np.array([[float(v) for v in row] for row in rows])
    out.setflags(write=False)
    return out


def derivative_matrix(basis: BasisSet, beta: float) -> np.ndarray:
    """a_ij = integral of (D^beta phi_i) phi_j over [0, 1], beta in (0, 1].

    Rows i < ceil(beta) vanish identically because the Caputo derivative
    annihilates every monomial of phi_i there.
    """
    if not 0 < beta <= 1:
        raise DomainError(f"advection order must lie in (0, 1], got {beta!r}")
    return _raw_matrix(basis.n, float(beta))


def dispersion_matrix(basis: BasisSet, gamma: float) -> np.ndarray:
    """b_ij = integral of (D^gamma phi_i) phi_j over [0, 1], gamma in (0, 2].

    The range is wider than the equation's nominal 1 < gamma <= 2 so that
    dispersion orders 2*beta with small beta remain expressible.
    """
    if not 0 < gamma <= 2:
        raise DomainError(f"dispersion order must lie in (0, 2], got {gamma!r}")
    return _raw_matrix(basis.n, float(gamma))


def system_matrix(a: np.ndarray, b: np.ndarray, nu: float, k: float) -> np.ndarray:
    """M = (k*b - nu*a)^T, the matrix acting on coefficient vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(
            f"matrices must be square and conformable, got {a.shape} and {b.shape}")
    out = np.ascontiguousarray((k * b - nu * a).T)
    out.setflags(write=False)
    return out


def source_coefficients(
    f, basis: BasisSet
) -> tuple[GeneralizedPolynomial, ...] | None:
    """Projection r_i(t) = <f(., t), phi_i> as polynomials in t.

    Returns one ``GeneralizedPolynomial`` in t per basis function when ``f``
    normalizes to a finite sum of c * x**p * t**q terms; returns None when
    only the numeric fallback applies ("None" signals the caller to attach a
    quadrature evaluator and a warning flag instead).
    """
    monomials = _as_monomial_sum(f)
    if monomials is None:
        return None
    n = basis.n
    per_basis: list[list[tuple[float, float]]] = [[] for _ in range(n + 1)]
    with mp.workdps(MP_DPS):
        phis = _mp_functions(n, MP_DPS)
        for c, p, q in monomials.terms:
            xpart = GeneralizedPolynomial.monomial(mp.mpf(1), p, "x")
            for i in range(n + 1):
                weight = float(integrate_01(xpart * phis[i]))
                if weight != 0.0:
                    per_basis[i].append((c * weight, q))
    return tuple(
        GeneralizedPolynomial.from_terms(terms, "t") for terms in per_basis)


def _as_monomial_sum(f) -> MonomialSum | None:
    if f is None:
        return MonomialSum(())
    if isinstance(f, MonomialSum):
        return f
    if isinstance(f, Classification):
        return f.monomials
    if isinstance(f, Expression):
        return classify(f).monomials
    if isinstance(f, GeneralizedPolynomial):
        if f.var == "x":
            return MonomialSum.from_terms((float(c), float(e), 0.0) for c, e in f.terms)
        return MonomialSum.from_terms((float(c), 0.0, float(e)) for c, e in f.terms)
    return None


@dataclass(frozen=True, eq=False)
class GalerkinSystem:
    """Assembled coefficient system c^alpha(t) = M c(t) + r(t)."""

    basis: BasisSet
    alpha: float
    beta: float
    gamma: float
    nu: float
    k: float
    advection: np.ndarray   # raw a_ij
    dispersion: np.ndarray  # raw b_ij
    matrix: np.ndarray      # M = (k*b - nu*a)^T
    source: tuple[GeneralizedPolynomial, ...] | None = None
    source_numeric: Callable[[float], np.ndarray] | None = None
    warnings: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def has_source(self) -> bool:
        return self.source is not None or self.source_numeric is not None

    @property
    def source_is_analytic(self) -> bool:
        return self.source is not None

    def source_at(self, t: float) -> np.ndarray:
        """r(t) as a plain vector; zero when the problem is homogeneous."""
        if self.source is not None:
            return np.array([float(r(t)) for r in self.source])
        if self.source_numeric is not None:
            return np.asarray(self.source_numeric(t), dtype=float)
        return np.zeros(self.n + 1)


def _numeric_source(f_eval: Callable[[float, float], float], n: int):
    def at(t: float) -> np.ndarray:
        return project(lambda x: f_eval(x, t), n).values

    return at


def assemble(
    basis: BasisSet,
    *,
    alpha: float,
    beta: float,
    gamma: float,
    nu: float,
    k: float,
    source=None,
    source_eval: Callable[[float, float], float] | None = None,
) -> GalerkinSystem:
    """Build the full Galerkin system for the given orders and constants.

    ``source`` may be anything ``source_coefficients`` understands; when it
    does not classify as a monomial sum, ``source_eval`` (a plain f(x, t)
    callable) is used through projection quadrature and the system carries a
    warning flag.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"time order must lie in (0, 1], got {alpha!r}")
    a = derivative_matrix(basis, beta)
    b = dispersion_matrix(basis, gamma)
    m = system_matrix(a, b, nu, k)
    r = source_coefficients(source, basis) if source is not None else None
    numeric = None
    warnings: tuple[str, ...] = ()
    if source is not None and r is None:
        if source_eval is None and callable(source):
            source_eval = source
        if source_eval is None:
            raise DomainError(
                "source does not classify as a monomial sum and no numeric "
                "evaluator was provided")
        numeric = _numeric_source(source_eval, basis.n)
        warnings = ("source-classification-fallback",)
    if r is not None and all(p.is_zero for p in r):
        r = None
    return GalerkinSystem(
        basis=basis, alpha=alpha, beta=beta, gamma=gamma, nu=nu, k=k,
        advection=a, dispersion=b, matrix=m,
        source=r, source_numeric=numeric, warnings=warnings)
