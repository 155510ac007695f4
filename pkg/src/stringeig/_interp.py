"""Quadrature and interpolation helpers shared by the solver and the
verification harness: composite Simpson on uniform grids and cubic
Hermite evaluation of sampled eigenfunctions."""

from __future__ import annotations

import numpy as np


def simpson_uniform(values: np.ndarray, h: float) -> float:
    """Composite Simpson over a uniform grid with an odd number of nodes."""
    n = values.shape[0]
    if n < 3 or n % 2 == 0:
        raise ValueError(f"Simpson needs an odd node count >= 3, got {n}")
    return (h / 3.0) * (values[0] + values[-1]
                        + 4.0 * values[1:-1:2].sum()
                        + 2.0 * values[2:-2:2].sum())


def odd(n: int) -> int:
    """Round up to the next odd integer."""
    n = int(n)
    return n if n % 2 == 1 else n + 1


def segmented_simpson(fn, edges, per_unit: float, min_nodes: int = 33) -> float:
    """Composite Simpson of a callable over consecutive [edges] intervals.

    Each interval gets its own uniform odd subgrid (about ``per_unit``
    cells per unit length), so integrands with kinks at the edges keep
    fourth-order convergence.
    """
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        nodes = odd(max(min_nodes, int(round((b - a) * per_unit)) + 1))
        xs = np.linspace(a, b, nodes)
        total += simpson_uniform(np.asarray(fn(xs), dtype=float), xs[1] - xs[0])
    return total


def hermite_eval(grid: np.ndarray, y: np.ndarray, dy: np.ndarray, xq,
                 with_derivative: bool = False):
    """Cubic Hermite interpolation of (y, dy) samples on a uniform grid.

    Fourth-order accurate between nodes; exact at nodes.  ``xq`` may be a
    scalar or an array; values outside [grid[0], grid[-1]] are clamped to
    the boundary cells.
    """
    xq = np.asarray(xq, dtype=float)
    h = grid[1] - grid[0]
    i = np.clip(((xq - grid[0]) / h).astype(int), 0, grid.shape[0] - 2)
    t = (xq - grid[i]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + t
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    val = h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1]
    if not with_derivative:
        return val
    d00 = (6.0 * t2 - 6.0 * t) / h
    d10 = 3.0 * t2 - 4.0 * t + 1.0
    d01 = (-6.0 * t2 + 6.0 * t) / h
    d11 = 3.0 * t2 - 2.0 * t
    der = d00 * y[i] + d10 * dy[i] + d01 * y[i + 1] + d11 * dy[i + 1]
    return val, der


def hermite_root(x0: float, x1: float, f0: float, f1: float,
                 df0: float, df1: float, target: float = 0.0,
                 tol: float = 1e-12) -> float:
    """Root of the cubic Hermite interpolant on [x0, x1] by bisection.

    Assumes f - target changes sign across the interval.  ``f0``/``f1``
    are the endpoint values, ``df0``/``df1`` endpoint derivatives.
    """
    h = x1 - x0

    def val(x):
        t = (x - x0) / h
        t2 = t * t
        t3 = t2 * t
        return ((2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * h * df0
                + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * h * df1) - target

    a, b = x0, x1
    fa = f0 - target
    if fa == 0.0:
        return a
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = val(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)
