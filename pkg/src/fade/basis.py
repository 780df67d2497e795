"""Legendre scaling functions on [0, 1]: construction, evaluation, projection.

The basis is phi_i(x) = sqrt(2i+1) * P_i(2x - 1), an orthonormal family in
L2[0, 1].  Two representations coexist on purpose:

* monomial coefficient lists, needed by the fractional-calculus rules, and
* the shifted-Legendre three-term recurrence, used for all pointwise
  evaluation because the monomial form cancels catastrophically as the
  degree grows.

That cancellation is why the basis size is capped at ``BASIS_CAP``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import DomainError, QuadratureError
from .fractional import GeneralizedPolynomial, integrate_01
from .quadrature import gauss_legendre_01

#: Hard cap on the basis-size index; monomial coefficients of phi_i overflow
#: the double-precision cancellation budget beyond this.
BASIS_CAP = 32

#: Quadrature size for projections (doubled once for the error estimate).
PROJECTION_NODES = 64

#: Two refinement levels disagreeing by more than this flag non-convergence.
PROJECTION_TOL = 1e-10


def _monomial_integers(i: int) -> list[int]:
    """Exact integer parts (i+k)! / ((i-k)! (k!)^2), k = 0..i, of phi_i."""
    return [
        math.factorial(i + k) // (math.factorial(i - k) * math.factorial(k) ** 2)
        for k in range(i + 1)
    ]


@dataclass(frozen=True)
class BasisSet:
    """The first n+1 Legendre scaling functions in monomial form."""

    n: int
    functions: tuple[GeneralizedPolynomial, ...]

    def __post_init__(self):
        if len(self.functions) != self.n + 1:
            raise DomainError("basis must hold exactly n+1 functions")


@lru_cache(maxsize=None)
def build_basis(n: int) -> BasisSet:
    """Construct phi_0..phi_n with monomial coefficients
    sqrt(2i+1) * (-1)**(i+k) * (i+k)! / ((i-k)! (k!)^2).
    """
    if n < 0:
        raise DomainError(f"basis size must be >= 0, got {n}")
    if n > BASIS_CAP:
        raise DomainError(
            f"basis size {n} exceeds the cap of {BASIS_CAP}; larger monomial "
            "coefficients exceed the double-precision cancellation budget")
    functions = []
    for i in range(n + 1):
        scale = math.sqrt(2 * i + 1)
        ints = _monomial_integers(i)
        terms = tuple(
            (scale * ints[k] * (-1) ** (i + k), float(k)) for k in range(i + 1))
        functions.append(GeneralizedPolynomial(terms, "x"))
    return BasisSet(n, tuple(functions))


@lru_cache(maxsize=None)
def _mp_functions(n: int, dps: int) -> tuple[GeneralizedPolynomial, ...]:
    """phi_0..phi_n with mpmath coefficients at ``dps`` digits."""
    with mp.workdps(dps):
        out = []
        for i in range(n + 1):
            scale = mp.sqrt(2 * i + 1)
            ints = _monomial_integers(i)
            terms = tuple(
                (scale * ints[k] * (-1) ** (i + k), float(k)) for k in range(i + 1))
            out.append(GeneralizedPolynomial(terms, "x"))
        return tuple(out)


class CoefficientVector:
    """Legendre scaling coefficients c_0..c_n of a function on [0, 1]."""

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coefficient vector must be one-dimensional and nonempty")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficient vector entries must be finite")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return self._values.size - 1

    def __len__(self):
        return self._values.size

    def __getitem__(self, i):
        return self._values[i]

    def __iter__(self):
        return iter(self._values)

    def __repr__(self):
        return f"CoefficientVector({np.array2string(self._values, precision=6)})"


def _as_values(c) -> np.ndarray:
    if isinstance(c, CoefficientVector):
        return c.values
    arr = np.asarray(c, dtype=float)
    if arr.ndim != 1:
        raise DomainError("expected a one-dimensional coefficient vector")
    return arr


def _phi_rows(n: int, x: np.ndarray) -> np.ndarray:
    """Matrix of phi_i(x_j), shape (n+1, len(x)), by the shifted recurrence."""
    x = np.asarray(x, dtype=float)
    y = 2.0 * x - 1.0
    rows = np.empty((n + 1, y.size))
    rows[0] = 1.0
    if n >= 1:
        rows[1] = y
    for m in range(1, n):
        rows[m + 1] = ((2 * m + 1) * y * rows[m] - m * rows[m - 1]) / (m + 1)
    scales = np.sqrt(2.0 * np.arange(n + 1) + 1.0)
    return rows * scales[:, None]


def evaluate_basis(basis: BasisSet, i: int, x):
    """phi_i(x) by the three-term Legendre recurrence on P_i(2x - 1)."""
    if not 0 <= i <= basis.n:
        raise IndexError(f"basis index {i} outside 0..{basis.n}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("evaluation point must lie in [0, 1]")
    vals = _phi_rows(i, np.atleast_1d(arr))[i]
    return float(vals[0]) if arr.ndim == 0 else vals


def synthesize(c, x):
    """Evaluate sum_i c_i phi_i(x); accepts scalars or arrays for x."""
    values = _as_values(c)
    arr = np.asarray(x, dtype=float)
    rows = _phi_rows(values.size - 1, np.atleast_1d(arr))
    out = values @ rows
    return float(out[0]) if arr.ndim == 0 else out


def _eval_on(f, xs: np.ndarray) -> np.ndarray:
    """Evaluate a scalar- or array-valued callable on the given nodes."""
    try:
        vals = np.asarray(f(xs), dtype=float)
        if vals.shape == xs.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(x))) for x in xs])


def project(f, n: int) -> CoefficientVector:
    """Coefficients c_i = <f, phi_i> of the first n+1 basis functions.

    A ``GeneralizedPolynomial`` in x is integrated analytically through
    ``integrate_01``; any other evaluable uses Gauss-Legendre quadrature with
    ``PROJECTION_NODES`` nodes, doubled once for an error estimate.  The
    quadrature runs in mpmath on high-precision nodes: parsed expressions are
    then projected to full double accuracy, while opaque float callables keep
    an (unavoidable) node-rounding floor near |f'| * 1e-16.
    """
    basis = build_basis(n)
    if isinstance(f, GeneralizedPolynomial):
        if f.var != "x":
            raise DomainError("projection requires a polynomial in x")
        return CoefficientVector(
            [float(integrate_01(f * phi)) for phi in basis.functions])

    coarse = _project_quadrature(f, n, PROJECTION_NODES)
    fine = _project_quadrature(f, n, 2 * PROJECTION_NODES)
    gap = np.max(np.abs(coarse - fine))
    if gap > PROJECTION_TOL * max(1.0, float(np.max(np.abs(fine)))):
        raise QuadratureError(
            f"projection quadrature levels disagree by {gap:.3e}")
    return CoefficientVector(fine)


_PROJECTION_DPS = 30


def _project_quadrature(f, n: int, nodes: int) -> np.ndarray:
    from .expressions import Expression, evaluate_mp
    from .quadrature import gauss_legendre_01_mp

    with mp.workdps(_PROJECTION_DPS):
        xs, ws = gauss_legendre_01_mp(nodes, _PROJECTION_DPS)
        if isinstance(f, Expression):
            fx = [evaluate_mp(f, x) for x in xs]
        else:
            fx = [mp.mpf(float(f(float(x)))) for x in xs]
        sums = [[] for _ in range(n + 1)]
        for x, w, fval in zip(xs, ws, fx):
            weighted = w * fval
            phi = _phi_column_mp(n, x)
            for i in range(n + 1):
                sums[i].append(weighted * phi[i])
        return np.array([float(mp.fsum(s)) for s in sums])


def _phi_column_mp(n: int, x):
    y = 2 * x - 1
    col = [mp.mpf(1)]
    if n >= 1:
        col.append(y)
    for m in range(1, n):
        col.append(((2 * m + 1) * y * col[m] - m * col[m - 1]) / (m + 1))
    return [col[i] * mp.sqrt(2 * i + 1) for i in range(n + 1)]
