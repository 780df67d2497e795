"""Gauss quadrature rules used for projections and singular convolutions."""

from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=None)
def gauss_legendre_01(m: int):
    """Nodes and weights of the m-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(m)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def gauss_legendre_01_mp(m: int, dps: int):
    """High-precision m-point Gauss-Legendre rule on [0, 1].

    Double-rounded nodes limit plain quadrature to about |f'| * 1e-16
    absolute accuracy; refining the nodes by Newton iteration on P_m at
    ``dps`` digits removes that floor for integrands evaluable in mpmath.
    """
    seeds, _ = np.polynomial.legendre.leggauss(m)
    with mp.workdps(dps):
        nodes = []
        weights = []
        for seed in seeds:
            x = mp.mpf(float(seed))
            for _ in range(3):  # quadratic convergence from 1e-15 seeds
                p, dp = _legendre_with_derivative(m, x)
                x = x - p / dp
            _, dp = _legendre_with_derivative(m, x)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x + 1) / 2)
            weights.append(w / 2)
        return tuple(nodes), tuple(weights)


def _legendre_with_derivative(m: int, x):
    p_prev, p = mp.mpf(1), x
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = m * (x * p - p_prev) / (x * x - 1)
    return p, dp


@lru_cache(maxsize=None)
def gauss_jacobi(m: int, a: float, b: float):
    """Nodes and weights on [-1, 1] for the weight (1-y)**a * (1+y)**b."""
    x, w = roots_jacobi(m, a, b)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w
