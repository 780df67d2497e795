"""Delimited output and figure rendering for solver runs.

CSV files are byte-deterministic: fixed column order, 17-significant-digit
'%.17g' formatting, '.' decimal separator, '\n' line endings, and atomic
writes (temp file then rename).  SVG figures are rendered with matplotlib
from exactly the arrays that went into the CSV; their bytes are not pinned,
only their XML validity and data provenance.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .analysis import ConvergenceTable, ErrorReport  # noqa: E402

SOLUTION_HEADER = "x,t,u_numeric,u_exact,abs_error"
CONVERGENCE_HEADER = "n,t,linf_error,l2_error,residual_norm,bound"
BOUND_HEADER = "n,empirical,bound,ratio"


def _fmt(value: float) -> str:
    return "%.17g" % float(value)


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_solution_csv(path, report: ErrorReport) -> Path:
    """One row per (x, t): x,t,u_numeric,u_exact,abs_error."""
    lines = [SOLUTION_HEADER]
    nan = float("nan")
    for ti, t in enumerate(report.ts):
        for xi, x in enumerate(report.xs):
            exact = report.u_exact[ti, xi] if report.has_exact else nan
            err = report.abs_error[ti, xi] if report.has_exact else nan
            lines.append(",".join((
                _fmt(x), _fmt(t), _fmt(report.u_numeric[ti, xi]),
                _fmt(exact), _fmt(err))))
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def write_convergence_csv(path, table: ConvergenceTable) -> Path:
    lines = [CONVERGENCE_HEADER]
    for row in table.rows:
        lines.append(",".join((
            str(row.n), _fmt(row.t), _fmt(row.linf), _fmt(row.l2),
            _fmt(row.residual), _fmt(row.bound))))
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def write_bound_csv(path, rows) -> Path:
    """Rows of (n, empirical, bound); the ratio column is empirical/bound."""
    lines = [BOUND_HEADER]
    for n, empirical, bound in rows:
        ratio = empirical / bound if bound else float("nan")
        lines.append(",".join((str(n), _fmt(empirical), _fmt(bound), _fmt(ratio))))
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def _atomic_savefig(fig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".svg")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def render_error_curves(path, report: ErrorReport) -> Path | None:
    """Absolute error against x, one curve per time level (log scale)."""
    if not report.has_exact:
        return None
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    floor = 1e-18
    for ti, t in enumerate(report.ts):
        ax.semilogy(report.xs, np.maximum(report.abs_error[ti], floor),
                    label=f"t = {t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("absolute error")
    ax.set_title(f"Absolute error at different time levels (n = {report.n})")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _atomic_savefig(fig, Path(path))
    return Path(path)


def render_overlay(path, report: ErrorReport) -> Path:
    """Numerical solution against x per time level, exact dashed on top."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for ti, t in enumerate(report.ts):
        line, = ax.plot(report.xs, report.u_numeric[ti], label=f"numeric t = {t:g}")
        if report.has_exact:
            ax.plot(report.xs, report.u_exact[ti], "--",
                    color=line.get_color(), linewidth=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel("u(x, t)")
    title = f"Numerical solution (n = {report.n})"
    if report.has_exact:
        title = f"Numerical vs exact solution (n = {report.n})"
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    _atomic_savefig(fig, Path(path))
    return Path(path)
