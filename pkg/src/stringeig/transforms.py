"""Legendre substitution: reduce -(p(x) y')' = lam*rho(x)*y with Dirichlet
conditions to a plain string problem.

With sigma = integral of 1/p over [0,1] and t(x) = (1/sigma) * integral of
1/p from 0 to x, the change of variable turns the equation into
-d^2y/dt^2 = lam * sigma^2 * p(x(t)) * rho(x(t)) * y on t in [0,1], so the
Sturm-Liouville spectrum equals the string spectrum of the effective
density sigma^2 * p~ * rho~.  The effective density is exposed as a
first-class Density, so the shooting solver consumes it unchanged.

t(x) is tabulated by per-cell Simpson on a dense grid (kinks of p are
inserted as cell boundaries) and inverted with monotone piecewise-cubic
interpolation; the effective density's derivative uses the exact relation
dx/dt = sigma * p(x(t)) rather than differentiating the table.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .density import Density, DensityError
from .prufer import DEFAULT_REL_TOL, eigenvalue

DEFAULT_TABLE_SIZE = 8193


@dataclass(frozen=True, eq=False)
class LegendreMap:
    """Monotone change of variable t(x) for coefficient p, with inverse."""

    p: Density
    rho: Density
    sigma: float
    table_x: np.ndarray
    table_t: np.ndarray
    _t_of_x: PchipInterpolator
    _x_of_t: PchipInterpolator

    def t_of_x(self, x):
        return self._t_of_x(np.asarray(x, dtype=float))

    def x_of_t(self, t):
        return self._x_of_t(np.asarray(t, dtype=float))

    @property
    def effective_density(self) -> "MappedDensity":
        return MappedDensity(self)


@dataclass(frozen=True, eq=False)
class MappedDensity(Density):
    """Effective string density sigma^2 * p(x(t)) * rho(x(t)) on t in [0,1]."""

    mapping: LegendreMap

    kind = "product"

    def __call__(self, t):
        m = self.mapping
        x = m.x_of_t(t)
        return m.sigma ** 2 * m.p(x) * m.rho(x)

    def derivative(self, t):
        return self.derivative_sided(t, +1)

    def derivative_sided(self, t, side):
        # d/dt [s^2 p(x) rho(x)] = s^2 (p rho)'(x) * dx/dt,  dx/dt = s*p(x)
        m = self.mapping
        x = m.x_of_t(t)
        prod_prime = (m.p.derivative_sided(x, side) * m.rho(x)
                      + m.p(x) * m.rho.derivative_sided(x, side))
        return m.sigma ** 3 * m.p(x) * prod_prime

    @property
    def differentiable(self):
        return self.mapping.p.differentiable and self.mapping.rho.differentiable

    @property
    def breakpoints(self):
        m = self.mapping
        kinks = sorted(set(m.p.breakpoints) | set(m.rho.breakpoints))
        if not kinks:
            return ()
        # knots were inserted into the table, so their t values are exact
        idx = np.searchsorted(m.table_x, np.asarray(kinks))
        return tuple(float(m.table_t[i]) for i in idx)

    @property
    def floor(self):
        m = self.mapping
        return m.sigma ** 2 * m.p.floor * m.rho.floor

    def bounds(self):
        m = self.mapping
        p_lo, p_hi = m.p.bounds()
        r_lo, r_hi = m.rho.bounds()
        return (m.sigma ** 2 * p_lo * r_lo, m.sigma ** 2 * p_hi * r_hi)

    def to_json(self):
        return {
            "kind": "product",
            "transform": "legendre",
            "p": self.mapping.p.to_json(),
            "rho": self.mapping.rho.to_json(),
            "table_size": int(self.mapping.table_x.shape[0]),
        }


def legendre_map(p: Density, rho: Density,
                 table_size: int = DEFAULT_TABLE_SIZE) -> LegendreMap:
    """Build the substitution table for coefficient ``p``.

    ``table_size`` controls the base grid; kinks of p are added to it.
    """
    if table_size < 17:
        raise DensityError(f"table size {table_size} too small")
    return _legendre_map_cached(p, rho, int(table_size))


@lru_cache(maxsize=64)
def _legendre_map_cached(p: Density, rho: Density, table_size: int) -> LegendreMap:
    base = np.linspace(0.0, 1.0, table_size)
    breaks = np.asarray([b for b in p.breakpoints if 0.0 < b < 1.0])
    xs = np.union1d(base, breaks) if breaks.size else base
    mids = 0.5 * (xs[:-1] + xs[1:])
    inv_l = 1.0 / np.asarray(p(xs[:-1]), dtype=float)
    inv_m = 1.0 / np.asarray(p(mids), dtype=float)
    inv_r = 1.0 / np.asarray(p(xs[1:]), dtype=float)
    if not (np.all(np.isfinite(inv_l)) and np.all(inv_l > 0.0) and np.all(inv_m > 0.0)):
        raise DensityError("p must be strictly positive for the substitution")
    widths = np.diff(xs)
    increments = (widths / 6.0) * (inv_l + 4.0 * inv_m + inv_r)
    cum = np.concatenate([[0.0], np.cumsum(increments)])
    sigma = float(cum[-1])
    ts = cum / sigma
    ts[0] = 0.0
    ts[-1] = 1.0
    return LegendreMap(
        p=p, rho=rho, sigma=sigma,
        table_x=xs, table_t=ts,
        _t_of_x=PchipInterpolator(xs, ts),
        _x_of_t=PchipInterpolator(ts, xs),
    )


def sl_eigenvalue(p: Density, rho: Density, n: int,
                  rel_tol: float = DEFAULT_REL_TOL,
                  table_size: int = DEFAULT_TABLE_SIZE) -> float:
    """n-th Dirichlet eigenvalue of -(p y')' = lam*rho*y, computed as a
    string eigenvalue of the Legendre effective density."""
    mapping = legendre_map(p, rho, table_size)
    return eigenvalue(mapping.effective_density, n, rel_tol)
