"""Propagators for the coefficient system c^alpha(t) = M c(t) + r(t).

Three homogeneous propagators are available:

* ``matrix-exp``      e^(M t), the classical alpha = 1 solution;
* ``alpha-exp``       t^(alpha-1) * sum_i M^i t^(i alpha) / Gamma((i+1) alpha),
                      the alpha-exponential, singular as t -> 0+;
* ``mittag-leffler``  E_alpha(M t^alpha) = sum_i M^i t^(i alpha) / Gamma(i alpha + 1),
                      regular at t = 0 and matching the Caputo initial value.

The alpha-exponential reproduces the literal fractional-case formula; the
Mittag-Leffler propagator is the default for alpha < 1 because only it
attaches the initial condition c(0+) = c(0).  Both series share one
truncation contract: stop once the next term's max-norm falls below
``tol`` times the accumulated max-norm, fail if that never happens within
``max_terms`` terms.

The non-homogeneous convolution uses the kernel
(t-s)^(alpha-1) E_{alpha,alpha}(M (t-s)^alpha), which coincides with the
alpha-exponential kernel, so the same term sums serve every propagator
choice.  For sources polynomial in t the convolution is summed exactly via
the Beta-function identity
integral_0^t (t-s)^((i+1) alpha - 1) s^mu ds = B(mu+1, (i+1) alpha) t^((i+1) alpha + mu);
otherwise a Gauss-Jacobi rule with the weight (t-s)^(alpha-1) absorbs the
endpoint singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .basis import CoefficientVector, _as_values
from .errors import DomainError, QuadratureError, SeriesConvergenceError
from .quadrature import gauss_jacobi

MATRIX_EXP = "matrix-exp"
ALPHA_EXP = "alpha-exp"
MITTAG_LEFFLER = "mittag-leffler"
KINDS = (MATRIX_EXP, ALPHA_EXP, MITTAG_LEFFLER)

#: Default series truncation contract.
SERIES_TOL = 1e-14
SERIES_MAX_TERMS = 200

#: Nodes for the singular convolution quadrature (doubled once to estimate error).
CONVOLUTION_NODES = 32
CONVOLUTION_TOL = 1e-9


@dataclass(frozen=True)
class SeriesInfo:
    """Truncation diagnostics: terms summed and the first neglected norm."""

    terms: int
    neglected_norm: float


def _check_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix entries must be finite")
    return arr


def _kahan_add(total, comp, term):
    y = term - comp
    s = total + y
    comp = (s - total) - y
    return s, comp


def _ml_series(z: np.ndarray, step: float, offset: float,
               tol: float, max_terms: int):
    """sum_{i>=0} z^i / Gamma(step*i + offset) with compensated summation."""
    dim = z.shape[0]
    term = np.eye(dim) / math.gamma(offset)
    total = term.copy()
    comp = np.zeros_like(term)
    for i in range(1, max_terms + 1):
        ratio = math.exp(math.lgamma(step * (i - 1) + offset)
                         - math.lgamma(step * i + offset))
        term = (term @ z) * ratio
        term_norm = float(np.max(np.abs(term)))
        total_norm = float(np.max(np.abs(total)))
        if term_norm < tol * max(total_norm, np.finfo(float).tiny):
            return total, SeriesInfo(terms=i, neglected_norm=term_norm)
        total, comp = _kahan_add(total, comp, term)
    raise SeriesConvergenceError(
        f"series did not meet tolerance {tol:g} within {max_terms} terms "
        f"(last term norm {term_norm:.3e})", last_term_norm=term_norm)


def matrix_exponential(m, t: float) -> np.ndarray:
    """e^(M t) by scaling and squaring with a Pade core."""
    arr = _check_matrix(m)
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t!r}")
    out = expm(arr * t)
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed")
    return out


def alpha_exponential(m, alpha: float, t: float,
                      tol: float = SERIES_TOL,
                      max_terms: int = SERIES_MAX_TERMS) -> np.ndarray:
    """The alpha-exponential e_alpha^(M t); strictly t > 0, alpha in (0, 1)."""
    value, _ = _alpha_exponential_info(m, alpha, t, tol, max_terms)
    return value


def _alpha_exponential_info(m, alpha, t, tol, max_terms):
    arr = _check_matrix(m)
    if not 0 < alpha < 1:
        raise DomainError(
            f"alpha-exponential requires alpha in (0, 1), got {alpha!r}")
    if not t > 0:
        raise DomainError(
            "alpha-exponential is singular at t = 0 (prefactor t**(alpha-1)); "
            f"got t = {t!r}")
    series, info = _ml_series(arr * t ** alpha, alpha, alpha, tol, max_terms)
    return t ** (alpha - 1.0) * series, info


def mittag_leffler_propagator(m, alpha: float, t: float,
                              tol: float = SERIES_TOL,
                              max_terms: int = SERIES_MAX_TERMS) -> np.ndarray:
    """E_alpha(M t^alpha); regular at t = 0, equals e^(M t) at alpha = 1."""
    value, _ = _mittag_leffler_info(m, alpha, t, tol, max_terms)
    return value


def _mittag_leffler_info(m, alpha, t, tol, max_terms):
    arr = _check_matrix(m)
    if not 0 < alpha <= 1:
        raise DomainError(
            f"Mittag-Leffler propagator requires alpha in (0, 1], got {alpha!r}")
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t!r}")
    return _ml_series(arr * t ** alpha, alpha, 1.0, tol, max_terms)


@dataclass(frozen=True, eq=False)
class Propagator:
    """Immutable homogeneous propagator with its truncation controls."""

    kind: str
    matrix: np.ndarray
    alpha: float
    tol: float = SERIES_TOL
    max_terms: int = SERIES_MAX_TERMS

    def __post_init__(self):
        object.__setattr__(self, "matrix", _check_matrix(self.matrix))
        if self.kind not in KINDS:
            raise DomainError(f"unknown propagator kind {self.kind!r}")
        if self.kind == ALPHA_EXP and not 0 < self.alpha < 1:
            raise DomainError(
                "the alpha-exponential propagator exists only for alpha in (0, 1)")
        if self.kind == MITTAG_LEFFLER and not 0 < self.alpha <= 1:
            raise DomainError("Mittag-Leffler requires alpha in (0, 1]")
        if self.kind == MATRIX_EXP and self.alpha != 1:
            raise DomainError("the matrix exponential propagates only alpha = 1")

    def at(self, t: float) -> np.ndarray:
        return self._compute(t)[0]

    def info(self, t: float) -> SeriesInfo:
        return self._compute(t)[1]

    def _compute(self, t: float):
        if self.kind == MATRIX_EXP:
            return matrix_exponential(self.matrix, t), SeriesInfo(0, 0.0)
        if self.kind == ALPHA_EXP:
            return _alpha_exponential_info(
                self.matrix, self.alpha, t, self.tol, self.max_terms)
        return _mittag_leffler_info(
            self.matrix, self.alpha, t, self.tol, self.max_terms)


def default_kind(alpha: float) -> str:
    return MATRIX_EXP if alpha == 1 else MITTAG_LEFFLER


def propagate_homogeneous(system, c0, t: float,
                          kind: str | None = None) -> CoefficientVector:
    """c(t) = P(t) c(0) for the homogeneous system."""
    values = _as_values(c0)
    if values.size != system.n + 1:
        raise DomainError(
            f"coefficient vector length {values.size} does not match n = {system.n}")
    prop = Propagator(kind or default_kind(system.alpha),
                      system.matrix, system.alpha)
    return CoefficientVector(prop.at(t) @ values)


def convolve_source(system, t: float,
                    tol: float = SERIES_TOL,
                    max_terms: int = SERIES_MAX_TERMS) -> CoefficientVector:
    """The non-homogeneous term integral_0^t kernel(t-s) r(s) ds.

    With every r_j polynomial in t the sum is exact (Beta identity); the
    i-th term reads M^i sum_mu v_mu Gamma(mu+1) t^((i+1) alpha + mu) /
    Gamma((i+1) alpha + mu + 1).  The truncation contract matches the
    propagator series.  Non-polynomial sources fall back to Gauss-Jacobi
    quadrature in s with the weight (t-s)^(alpha-1).
    """
    size = system.n + 1
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t!r}")
    if t == 0 or not system.has_source:
        return CoefficientVector(np.zeros(size))
    if system.source is not None:
        return CoefficientVector(
            _convolve_analytic(system, t, tol, max_terms))
    return CoefficientVector(_convolve_quadrature(system, t, tol, max_terms))


def _convolve_analytic(system, t, tol, max_terms):
    alpha = system.alpha
    m = system.matrix
    size = system.n + 1
    powers: dict[float, np.ndarray] = {}
    for j, poly in enumerate(system.source):
        for c, mu in poly.terms:
            vec = powers.setdefault(float(mu), np.zeros(size))
            vec[j] += float(c)
    if not powers:
        return np.zeros(size)
    mus = sorted(powers)
    vectors = [powers[mu] for mu in mus]
    total = np.zeros(size)
    comp = np.zeros(size)
    for i in range(max_terms + 1):
        front = (i + 1) * alpha
        term = np.zeros(size)
        for mu, vec in zip(mus, vectors):
            weight = math.exp(math.lgamma(mu + 1.0)
                              - math.lgamma(front + mu + 1.0))
            term += vec * (weight * t ** (front + mu))
        term_norm = float(np.max(np.abs(term)))
        total_norm = float(np.max(np.abs(total)))
        if i > 0 and term_norm < tol * max(total_norm, np.finfo(float).tiny):
            return total
        total, comp = _kahan_add(total, comp, term)
        vectors = [m @ vec for vec in vectors]
    raise SeriesConvergenceError(
        f"convolution series did not meet tolerance {tol:g} within "
        f"{max_terms} terms (last term norm {term_norm:.3e})",
        last_term_norm=term_norm)


def _convolve_quadrature(system, t, tol, max_terms):
    coarse = _convolve_nodes(system, t, CONVOLUTION_NODES, tol, max_terms)
    fine = _convolve_nodes(system, t, 2 * CONVOLUTION_NODES, tol, max_terms)
    gap = float(np.max(np.abs(coarse - fine)))
    if gap > CONVOLUTION_TOL * max(1.0, float(np.max(np.abs(fine)))):
        raise QuadratureError(
            f"convolution quadrature levels disagree by {gap:.3e}")
    return fine


def _convolve_nodes(system, t, nodes, tol, max_terms):
    alpha = system.alpha
    m = system.matrix
    y, w = gauss_jacobi(nodes, alpha - 1.0, 0.0)
    total = np.zeros(system.n + 1)
    for yq, wq in zip(y, w):
        s = t * (yq + 1.0) / 2.0
        lag = t - s
        if alpha == 1:
            kernel = matrix_exponential(m, lag)
        else:
            kernel, _ = _ml_series(m * lag ** alpha, alpha, alpha, tol, max_terms)
        total += wq * (kernel @ system.source_at(s))
    return (t / 2.0) ** alpha * total
