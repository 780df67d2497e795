"""Built-in example problems used by the CLI and the verification suite.

Example 1 is the homogeneous advection-dispersion problem with initial
datum exp(-x); at the default integer orders its exact solution is
exp(-x + 2t).  Examples 2 and 3 carry polynomial exact solutions
(x^2 + t^2 and x^2 + t) whose forcing terms are manufactured from the
requested orders, so every order variant keeps a usable reference solution.
Example 2's printed equation moves the forcing to the other side; the
mapping to the canonical form flips its sign, which is what
``manufacture_source`` produces directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import manufacture_source
from .errors import ConfigError
from .expressions import Expression, MonomialSum, parse
from .solver import ProblemSpec

EXAMPLE_NUMBERS = (1, 2, 3)


@dataclass(frozen=True)
class PresetRun:
    """A ready-to-solve problem plus its reference solution and time levels."""

    spec: ProblemSpec
    exact: Expression | MonomialSum | None
    t_list: tuple[float, ...]
    label: str


def example_problem(number: int, n: int | None = None,
                    alpha: float | None = None, beta: float | None = None,
                    propagator: str = "auto") -> PresetRun:
    """Instantiate one of the three built-in problems with optional overrides."""
    if number == 1:
        return _example_1(n, alpha, beta, propagator)
    if number == 2:
        return _example_2(n, alpha, beta, propagator)
    if number == 3:
        return _example_3(n, alpha, beta, propagator)
    raise ConfigError(f"example number must be one of {EXAMPLE_NUMBERS}, got {number}")


def _example_1(n, alpha, beta, propagator) -> PresetRun:
    a = 1.0 if alpha is None else alpha
    b = 1.0 if beta is None else beta
    spec = ProblemSpec(alpha=a, beta=b, gamma=2.0, nu=1.0, k=1.0,
                       g="exp(-x)", n=10 if n is None else n,
                       propagator=propagator)
    exact = parse("exp(-x + 2*t)") if (a == 1.0 and b == 1.0) else None
    return PresetRun(spec=spec, exact=exact,
                     t_list=(0.00001, 0.1, 0.5, 0.9, 0.99999),
                     label="example-1")


def _example_2(n, alpha, beta, propagator) -> PresetRun:
    a = 1.0 if alpha is None else alpha
    b = 1.0 if beta is None else beta
    gamma = 2.0 * b  # the dispersion order is twice the printed beta
    exact = parse("x^2 + t^2")
    source = manufacture_source(exact, a, 1.0, gamma, 1.0, 1.0)
    spec = ProblemSpec(alpha=a, beta=1.0, gamma=gamma, nu=1.0, k=1.0,
                       g="x^2", n=4 if n is None else n, f=source,
                       propagator=propagator)
    return PresetRun(spec=spec, exact=exact,
                     t_list=(0.1, 0.25, 0.5, 0.75, 0.9),
                     label="example-2")


def _example_3(n, alpha, beta, propagator) -> PresetRun:
    a = 0.5 if alpha is None else alpha
    b = 1.0 if beta is None else beta
    exact = parse("x^2 + t")
    source = manufacture_source(exact, a, b, 2.0, 1.0, 1.0)
    spec = ProblemSpec(alpha=a, beta=b, gamma=2.0, nu=1.0, k=1.0,
                       g="x^2", n=4 if n is None else n, f=source,
                       propagator=propagator)
    return PresetRun(spec=spec, exact=exact,
                     t_list=(0.1, 0.25, 0.5, 0.75, 0.9),
                     label="example-3")
