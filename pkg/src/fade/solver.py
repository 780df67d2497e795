"""End-to-end pipeline: problem definition -> assembled system -> u_n(x, t).

``solve`` projects the initial datum, assembles the Galerkin system, and
returns a ``Solution`` whose coefficient path c(t) is evaluated on demand by
the selected propagator (no stored trajectory).  Propagator choice:

* ``auto``            matrix exponential at alpha = 1, Mittag-Leffler below;
* ``mittag-leffler``  force the Mittag-Leffler series (any admissible alpha);
* ``paper-literal``   the alpha-exponential formula for alpha < 1, which is
                      singular at t = 0+ and therefore cannot attach the
                      initial condition; kept for side-by-side comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import GalerkinSystem, assemble
from .basis import BasisSet, CoefficientVector, build_basis, project, synthesize
from .errors import DomainError
from .expressions import (
    Classification,
    Expression,
    MonomialSum,
    classify,
    parse,
    references_time,
)
from .fractional import GeneralizedPolynomial
from .propagators import (
    ALPHA_EXP,
    MATRIX_EXP,
    MITTAG_LEFFLER,
    Propagator,
    convolve_source,
    default_kind,
)

PROPAGATOR_CHOICES = ("auto", "paper-literal", "mittag-leffler")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Full problem definition for
    d^alpha u / dt^alpha = -nu d^beta u / dx^beta + k d^gamma u / dx^gamma + f
    on [0, 1] with u(x, 0) = g(x).

    ``g`` and ``f`` accept expression strings (see ``fade.expressions``),
    parsed ``Expression`` objects, ``GeneralizedPolynomial``/``MonomialSum``
    values, or plain callables.
    """

    alpha: float
    beta: float
    gamma: float
    nu: float
    k: float
    g: object
    n: int
    f: object = None
    propagator: str = "auto"

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not 0 < self.beta <= 1:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")
        if not 0 < self.gamma <= 2:
            raise DomainError(f"gamma must lie in (0, 2], got {self.gamma!r}")
        if not 0 <= self.n <= 32:
            raise DomainError(f"basis size must lie in 0..32, got {self.n!r}")
        if self.propagator not in PROPAGATOR_CHOICES:
            raise DomainError(
                f"propagator must be one of {PROPAGATOR_CHOICES}, "
                f"got {self.propagator!r}")
        if isinstance(self.g, str):
            object.__setattr__(self, "g", parse(self.g))
        if isinstance(self.f, str):
            object.__setattr__(self, "f", parse(self.f))
        if isinstance(self.g, Expression) and references_time(self.g):
            raise DomainError("initial datum g must depend on x only")


def _as_projectable(g):
    """Normalize an initial datum to something ``project`` accepts."""
    if isinstance(g, str):
        g = parse(g)
    if isinstance(g, GeneralizedPolynomial):
        if g.var != "x":
            raise DomainError("initial datum must be a polynomial in x")
        return g
    if isinstance(g, MonomialSum):
        if not g.is_time_independent:
            raise DomainError("initial datum g must depend on x only")
        return GeneralizedPolynomial.from_terms(
            ((c, p) for c, p, _ in g.terms), "x")
    if isinstance(g, Expression):
        cls = classify(g)
        if cls.kind == "monomial-sum":
            return _as_projectable(cls.monomials)
        return lambda x: g(x, 0.0)
    if callable(g):
        return g
    raise DomainError(f"cannot interpret initial datum {g!r}")


def initial_coefficients(g, n: int) -> CoefficientVector:
    """c_i(0) = <g, phi_i> for i = 0..n."""
    return project(_as_projectable(g), n)


def _resolve_kind(choice: str, alpha: float) -> str:
    if choice == "auto":
        return default_kind(alpha)
    if choice == "mittag-leffler":
        return MITTAG_LEFFLER
    # paper-literal: the integer case is the plain matrix exponential
    return MATRIX_EXP if alpha == 1 else ALPHA_EXP


@dataclass(frozen=True, eq=False)
class Solution:
    """Solved problem: coefficient path evaluator plus its Galerkin system."""

    system: GalerkinSystem
    c0: CoefficientVector
    propagator: Propagator
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def basis(self) -> BasisSet:
        return self.system.basis

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def metadata(self) -> dict:
        return {
            "propagator": self.propagator.kind,
            "series_tol": self.propagator.tol,
            "series_max_terms": self.propagator.max_terms,
            "warnings": self.system.warnings,
        }

    def coefficients(self, t: float) -> CoefficientVector:
        """c(t), cached per requested time."""
        t = float(t)
        if t < 0:
            raise DomainError(f"time must be >= 0, got {t!r}")
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        values = self.propagator.at(t) @ self.c0.values
        if self.system.has_source and t > 0:
            values = values + convolve_source(
                self.system, t, self.propagator.tol,
                self.propagator.max_terms).values
        out = CoefficientVector(values)
        self._cache[t] = out
        return out

    def __call__(self, x, t: float):
        return evaluate_solution(self, x, t)


def solve(spec: ProblemSpec) -> Solution:
    """Project g, assemble the system, and wrap the selected propagator."""
    basis = build_basis(spec.n)
    c0 = initial_coefficients(spec.g, spec.n)
    system = assemble(
        basis, alpha=spec.alpha, beta=spec.beta, gamma=spec.gamma,
        nu=spec.nu, k=spec.k, source=spec.f)
    kind = _resolve_kind(spec.propagator, spec.alpha)
    propagator = Propagator(kind, system.matrix, spec.alpha)
    return Solution(system=system, c0=c0, propagator=propagator)


def evaluate_solution(sol: Solution, x, t: float):
    """u_n(x, t) = sum_i c_i(t) phi_i(x)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("evaluation point must lie in [0, 1]")
    return synthesize(sol.coefficients(t), x)
