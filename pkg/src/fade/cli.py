"""Batch command-line front end.

Subcommands:

* ``solve --config FILE``      solve a configured problem, emit CSV (+ SVG);
* ``example {1,2,3}``          run a built-in problem preset;
* ``convergence --config FILE --n-list 4,6,8``  basis-size sweep table;
* ``bound --f EXPR --K VALUE --n-max N``        truncation-bound check table.

Exit status: 0 on success, 1 on configuration errors, 2 on numerical
failures (series cap reached, quadrature disagreement, overflow).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    convergence_study,
    empirical_truncation,
    error_report,
    truncation_bound,
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
from .presets import PresetRun, example_problem
from .reports import (
    render_error_curves,
    render_overlay,
    write_bound_csv,
    write_convergence_csv,
    write_solution_csv,
)
from .solver import ProblemSpec, solve

CONFIG_KEYS = ("alpha", "beta", "gamma", "nu", "k", "n", "g", "f",
               "exact", "t_list", "x_points", "propagator")
_REQUIRED_KEYS = ("alpha", "beta", "gamma", "nu", "k", "n", "g")

_CONFIG_ERRORS = (ConfigError, ParseError, DomainError, FileNotFoundError)
_NUMERICAL_ERRORS = (SeriesConvergenceError, QuadratureError,
                     EvaluationError, OverflowError)


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; unknown keys are rejected."""
    out: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    missing = [k for k in _REQUIRED_KEYS if k not in out]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    return out


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected a number, got {raw!r}") from exc


def _parse_float_list(raw: str, key: str) -> tuple[float, ...]:
    items = [part.strip() for part in raw.split(",") if part.strip()]
    if not items:
        raise ConfigError(f"key {key!r}: expected a comma-separated list")
    return tuple(_parse_float(item, key) for item in items)


def config_to_spec(cfg: dict) -> ProblemSpec:
    try:
        n = int(cfg["n"])
    except ValueError as exc:
        raise ConfigError(f"key 'n': expected an integer, got {cfg['n']!r}") from exc
    f_text = cfg.get("f")
    if f_text in (None, "", "0"):
        f_text = None
    return ProblemSpec(
        alpha=_parse_float(cfg["alpha"], "alpha"),
        beta=_parse_float(cfg["beta"], "beta"),
        gamma=_parse_float(cfg["gamma"], "gamma"),
        nu=_parse_float(cfg["nu"], "nu"),
        k=_parse_float(cfg["k"], "k"),
        g=cfg["g"], n=n, f=f_text,
        propagator=cfg.get("propagator", "auto"))


def _x_grid(cfg: dict) -> np.ndarray:
    raw = cfg.get("x_points", "101")
    values = _parse_float_list(raw, "x_points")
    if len(values) == 1:
        count = int(values[0])
        if count < 2 or count != values[0]:
            raise ConfigError(
                f"key 'x_points': expected a point count >= 2 or an explicit "
                f"grid, got {raw!r}")
        return np.linspace(0.0, 1.0, count)
    grid = np.asarray(values, dtype=float)
    if np.any(grid < 0.0) or np.any(grid > 1.0):
        raise ConfigError("key 'x_points': explicit grid must lie in [0, 1]")
    return grid


def _emit_solution(spec: ProblemSpec, exact, t_list, xs, out_dir: Path,
                   emit_csv: bool, emit_svg: bool) -> int:
    sol = solve(spec)
    report = error_report(sol, exact, xs, t_list)
    if emit_csv:
        path = write_solution_csv(out_dir / "solution.csv", report)
        print(f"wrote {path}")
    if emit_svg:
        curves = render_error_curves(out_dir / "error_curves.svg", report)
        if curves is not None:
            print(f"wrote {curves}")
        overlay = render_overlay(out_dir / "overlay.svg", report)
        print(f"wrote {overlay}")
    if report.has_exact:
        for ti, t in enumerate(report.ts):
            print(f"t = {t:g}: max abs error = {report.linf[ti]:.6e}, "
                  f"L2 error = {report.l2[ti]:.6e}")
    else:
        print("no exact solution supplied; error columns are nan")
    return 0


def _cmd_solve(args) -> int:
    cfg = read_config(args.config)
    spec = config_to_spec(cfg)
    exact = cfg.get("exact") or None
    t_list = _parse_float_list(cfg.get("t_list", "0.1, 0.5, 1.0"), "t_list")
    xs = _x_grid(cfg)
    return _emit_solution(spec, exact, t_list, xs, Path(args.out),
                          not args.no_csv, not args.no_svg)


def _cmd_example(args) -> int:
    if args.x_points < 2:
        raise ConfigError("--x-points must be >= 2")
    run: PresetRun = example_problem(
        args.number, n=args.n, alpha=args.alpha, beta=args.beta,
        propagator=args.propagator)
    xs = np.linspace(0.0, 1.0, args.x_points)
    print(f"{run.label}: alpha={run.spec.alpha:g} beta={run.spec.beta:g} "
          f"gamma={run.spec.gamma:g} n={run.spec.n} "
          f"propagator={run.spec.propagator}")
    return _emit_solution(run.spec, run.exact, run.t_list, xs,
                          Path(args.out), not args.no_csv, not args.no_svg)


def _cmd_convergence(args) -> int:
    cfg = read_config(args.config)
    spec = config_to_spec(cfg)
    exact = cfg.get("exact") or None
    t_list = _parse_float_list(cfg.get("t_list", "0.1, 0.5, 1.0"), "t_list")
    try:
        n_list = tuple(int(part) for part in args.n_list.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"--n-list: expected integers, got {args.n_list!r}") from exc
    if not n_list:
        raise ConfigError("--n-list must name at least one basis size")
    table = convergence_study(spec, n_list, t_list, exact=exact, K=args.K)
    path = write_convergence_csv(Path(args.out) / "convergence.csv", table)
    print(f"wrote {path}")
    for row in table.rows:
        print(f"n={row.n} t={row.t:g}: linf={row.linf:.6e} l2={row.l2:.6e} "
              f"residual={row.residual:.6e} bound={row.bound:.6e}")
    for n, t, message in table.failures:
        where = f"n={n}" + ("" if t is None else f" t={t:g}")
        print(f"failed {where}: {message}", file=sys.stderr)
    if table.failures and not table.rows:
        raise SeriesConvergenceError("every convergence cell failed")
    return 0


def _cmd_bound(args) -> int:
    if args.n_max < 2:
        raise ConfigError("--n-max must be >= 2")
    rows = []
    for n in range(2, args.n_max + 1):
        empirical = empirical_truncation(args.f, n)
        bound = truncation_bound(args.K, n)
        rows.append((n, empirical, bound))
    path = write_bound_csv(Path(args.out) / "bound.csv", rows)
    print(f"wrote {path}")
    print(f"{'n':>4} {'empirical':>14} {'bound':>14} {'holds':>6}")
    for n, empirical, bound in rows:
        print(f"{n:>4} {empirical:>14.6e} {bound:>14.6e} "
              f"{'yes' if empirical <= bound else 'NO':>6}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fade",
        description="Legendre spectral Galerkin solver for fractional "
                    "advection-dispersion equations on [0, 1].")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--no-csv", action="store_true",
                        help="skip delimited output")
    common.add_argument("--no-svg", action="store_true",
                        help="skip figure rendering")

    p_solve = sub.add_parser("solve", parents=[common],
                             help="solve a configured problem")
    p_solve.add_argument("--config", required=True)
    p_solve.set_defaults(func=_cmd_solve)

    p_example = sub.add_parser("example", parents=[common],
                               help="run a built-in example problem")
    p_example.add_argument("number", type=int, choices=(1, 2, 3))
    p_example.add_argument("--n", type=int, default=None)
    p_example.add_argument("--alpha", type=float, default=None)
    p_example.add_argument("--beta", type=float, default=None)
    p_example.add_argument("--propagator", default="auto",
                           choices=("auto", "paper-literal", "mittag-leffler"))
    p_example.add_argument("--x-points", type=int, default=101)
    p_example.set_defaults(func=_cmd_example)

    p_conv = sub.add_parser("convergence", parents=[common],
                            help="basis-size convergence table")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--n-list", required=True,
                        help="comma-separated basis sizes, e.g. 4,6,8,10")
    p_conv.add_argument("--K", type=float, default=None,
                        help="second-derivative bound for the tail-bound column")
    p_conv.set_defaults(func=_cmd_convergence)

    p_bound = sub.add_parser("bound", parents=[common],
                             help="empirical truncation vs tail bound")
    p_bound.add_argument("--f", required=True, help="expression for f(x)")
    p_bound.add_argument("--K", type=float, required=True,
                         help="bound on |f''| over [0, 1]")
    p_bound.add_argument("--n-max", type=int, required=True)
    p_bound.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; the contract reserves 2 for
        # numerical failures, so usage problems map to the config status.
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except FadeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
