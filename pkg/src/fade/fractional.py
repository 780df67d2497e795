"""Symbolic fractional calculus on generalized polynomials.

A generalized polynomial is a finite sum of terms ``c * x**e`` with real
exponents ``e > -1``.  This family is closed under the Caputo derivative and
the Riemann-Liouville integral, which act term by term through gamma-function
ratios, so the Galerkin assembly downstream can be done in closed form.

Coefficients may be Python floats or ``mpmath.mpf`` values; all operations
preserve the coefficient type.  The high-precision path exists because the
monomial representation of high-degree basis functions cancels catastrophically
in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .errors import DomainError

#: Exponents closer than this are merged during canonicalization.
EXPONENT_MERGE_TOL = 1e-12


def gamma(z: float) -> float:
    """Gamma function restricted to strictly positive real arguments.

    Raises ``DomainError`` for z <= 0 (reflection is never needed here) and
    lets ``OverflowError`` propagate for arguments beyond double range.
    """
    if not z > 0:
        raise DomainError(f"gamma requires z > 0, got {z!r}")
    return math.gamma(z)


def _gamma_like(z: float, like) -> float:
    """Gamma of ``z`` computed at the precision of the coefficient ``like``."""
    if isinstance(like, mp.mpf):
        return mp.gamma(z)
    return gamma(z)


def _fsum(values, sample):
    if isinstance(sample, mp.mpf):
        return mp.fsum(values)
    return math.fsum(values)


def _is_integer(e: float) -> bool:
    return abs(e - round(e)) <= EXPONENT_MERGE_TOL


def _pow(base, exponent):
    """base**exponent with the 0**0 == 1 convention."""
    if base == 0:
        if exponent == 0:
            return 1.0
        if exponent < 0:
            raise DomainError(f"0**{exponent} is undefined")
        return 0.0
    if isinstance(base, mp.mpf) or isinstance(exponent, mp.mpf):
        return mp.power(base, exponent)
    return math.pow(base, exponent)


@dataclass(frozen=True)
class GeneralizedPolynomial:
    """Finite sum of ``c * var**e`` terms with real exponents ``e > -1``.

    ``terms`` is kept canonical: sorted by exponent, exponents pairwise
    distinct (merged when closer than ``EXPONENT_MERGE_TOL``), and no
    zero coefficients.
    """

    terms: tuple
    var: str = "x"

    def __post_init__(self):
        if self.var not in ("x", "t"):
            raise DomainError(f"variable tag must be 'x' or 't', got {self.var!r}")
        merged = _canonicalize(self.terms)
        object.__setattr__(self, "terms", merged)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, var: str = "x") -> "GeneralizedPolynomial":
        return cls((), var)

    @classmethod
    def constant(cls, value, var: str = "x") -> "GeneralizedPolynomial":
        return cls(((value, 0.0),), var)

    @classmethod
    def monomial(cls, coefficient, exponent, var: str = "x") -> "GeneralizedPolynomial":
        return cls(((coefficient, exponent),), var)

    @classmethod
    def from_terms(cls, pairs, var: str = "x") -> "GeneralizedPolynomial":
        return cls(tuple(pairs), var)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        """Largest exponent, or None for the zero polynomial."""
        return self.terms[-1][1] if self.terms else None

    def __call__(self, s):
        if not self.terms:
            return 0.0
        return _fsum((c * _pow(s, e) for c, e in self.terms), self.terms[0][0])

    # -- algebra -----------------------------------------------------------

    def _check_var(self, other: "GeneralizedPolynomial"):
        if self.var != other.var:
            raise DomainError(
                f"variable mismatch: {self.var!r} vs {other.var!r}")

    def __add__(self, other):
        if not isinstance(other, GeneralizedPolynomial):
            return NotImplemented
        self._check_var(other)
        return GeneralizedPolynomial(self.terms + other.terms, self.var)

    def __sub__(self, other):
        if not isinstance(other, GeneralizedPolynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return GeneralizedPolynomial(tuple((-c, e) for c, e in self.terms), self.var)

    def __mul__(self, other):
        if isinstance(other, GeneralizedPolynomial):
            self._check_var(other)
            products = tuple(
                (c1 * c2, e1 + e2)
                for c1, e1 in self.terms for c2, e2 in other.terms)
            return GeneralizedPolynomial(products, self.var)
        return GeneralizedPolynomial(
            tuple((c * other, e) for c, e in self.terms), self.var)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"{float(c):.6g}*{self.var}^{float(e):.6g}" for c, e in self.terms]
        return " + ".join(parts)


def _canonicalize(terms) -> tuple:
    for c, e in terms:
        if not e > -1:
            raise DomainError(f"exponent must exceed -1, got {e!r}")
    ordered = sorted(terms, key=lambda ce: float(ce[1]))
    merged = []
    for c, e in ordered:
        if merged and float(e) - float(merged[-1][1]) <= EXPONENT_MERGE_TOL:
            merged[-1][0] = merged[-1][0] + c
        else:
            merged.append([c, e])
    return tuple((c, e) for c, e in merged if c != 0)


def caputo_derivative(p: GeneralizedPolynomial, order: float) -> GeneralizedPolynomial:
    """Caputo fractional derivative of order ``order`` in (0, 2].

    Acts term by term: a monomial with exponent k maps to
    ``Gamma(k+1)/Gamma(k+1-order) * x**(k-order)`` when k is a nonnegative
    integer >= ceil(order) or a non-integer > floor(order); nonnegative
    integers below ceil(order) are annihilated.  Non-integer exponents at or
    below floor(order) have no monomial rule and are rejected.
    """
    if not 0 < order <= 2:
        raise DomainError(f"Caputo order must lie in (0, 2], got {order!r}")
    ceil_m = math.ceil(order)
    floor_m = math.floor(order)
    out = []
    for c, e in p.terms:
        if _is_integer(e):
            k = round(e)
            if k < ceil_m:
                continue
            e = float(k)
        elif not e > floor_m:
            raise DomainError(
                f"no Caputo monomial rule for exponent {e!r} at order {order!r} "
                f"(non-integer exponents must exceed floor(order))")
        ratio = _gamma_like(float(e) + 1.0, c) / _gamma_like(float(e) + 1.0 - order, c)
        out.append((c * ratio, float(e) - order))
    return GeneralizedPolynomial(tuple(out), p.var)


def rl_integral(p: GeneralizedPolynomial, order: float) -> GeneralizedPolynomial:
    """Riemann-Liouville fractional integral of order ``order`` >= 0.

    Order zero is the identity; otherwise each monomial x**k maps to
    ``Gamma(k+1)/Gamma(k+1+order) * x**(k+order)``.
    """
    if order < 0:
        raise DomainError(f"integral order must be >= 0, got {order!r}")
    if order == 0:
        return p
    out = tuple(
        (c * _gamma_like(float(e) + 1.0, c) / _gamma_like(float(e) + 1.0 + order, c),
         float(e) + order)
        for c, e in p.terms)
    return GeneralizedPolynomial(out, p.var)


def integrate_01(p: GeneralizedPolynomial):
    """Definite integral over [0, 1]: sum of c / (e + 1)."""
    if not p.terms:
        return 0.0
    return _fsum((c / (e + 1.0) for c, e in p.terms), p.terms[0][0])


def classical_derivative(p: GeneralizedPolynomial) -> GeneralizedPolynomial:
    """Ordinary first derivative, defined only when no exponent falls in (−1, 0)."""
    out = []
    for c, e in p.terms:
        if _is_integer(e) and round(e) == 0:
            continue
        out.append((c * e, float(e) - 1.0))
    return GeneralizedPolynomial(tuple(out), p.var)


def to_mp(p: GeneralizedPolynomial) -> GeneralizedPolynomial:
    """Copy with coefficients lifted to mpmath at the current precision."""
    return GeneralizedPolynomial(
        tuple((mp.mpf(c) if not isinstance(c, mp.mpf) else c, e) for c, e in p.terms),
        p.var)


def to_float(p: GeneralizedPolynomial) -> GeneralizedPolynomial:
    return GeneralizedPolynomial(
        tuple((float(c), float(e)) for c, e in p.terms), p.var)
