"""Dirichlet eigenvalues and eigenfunctions of -y'' = lam * rho(x) * y.

The solver shoots on the Pruefer phase angle: with y = r sin(theta),
y' = r cos(theta), the angle obeys theta' = cos^2(theta) +
lam*rho(x)*sin^2(theta), theta(0) = 0, and lam is the n-th eigenvalue
exactly when theta(1; lam) = n*pi.  theta(1; .) is strictly increasing,
so bracketing the root between the comparison bounds
n^2 pi^2 / max(rho) <= lam_n <= n^2 pi^2 / min(rho) is guaranteed.

For the root solve itself the integrator works on the amplitude-scaled
angle phi with phi' = sqrt(lam*rho) + (rho'/4rho) sin(2*phi), which
crosses multiples of pi at exactly the same points but keeps the
right-hand side O(sqrt(lam)); fixed-step RK4 then resolves high modes to
near machine precision where the plain form loses 4-6 digits.  Densities
without a usable derivative fall back to the plain form.

Integration is classical fixed-step RK4 (default 4096 steps) with step
boundaries forced onto density kinks, so the integrand is smooth inside
every step and the order-4 convergence is retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from ._interp import hermite_eval, hermite_root, segmented_simpson, simpson_uniform
from .density import Density

DEFAULT_STEPS = 4096
DEFAULT_GRID = 2049
DEFAULT_REL_TOL = 1e-10

# Beyond this index the step count grows linearly with n so the phase
# resolution per oscillation stays constant.
STEP_SCALE_INDEX = 64

_BISECT_WIDTH = 1e-3  # relative bracket width handed from bisection to secant

_default_steps = DEFAULT_STEPS


def set_default_steps(steps: int) -> None:
    """Override the process-wide default RK4 step count (CLI --grid)."""
    global _default_steps
    if steps < 64:
        raise ValueError(f"step count must be >= 64, got {steps}")
    _default_steps = int(steps)


def get_default_steps() -> int:
    return _default_steps


class SolverError(RuntimeError):
    """Solver failure (bracketing or internal consistency)."""


class ConsistencyError(SolverError):
    """Computed eigenfunction violates a structural invariant, which
    signals integrator under-resolution rather than bad input."""


@dataclass(frozen=True)
class PruferState:
    """Phase-plane state at one position: y = r sin(theta), y' = r cos(theta)."""
    x: float
    theta: float
    log_r: float


@dataclass(frozen=True)
class Eigenpair:
    """Eigenvalue with its normalized eigenfunction sampled on a uniform grid.

    Normalization: integral of rho*y^2 over [0,1] equals 1; sign fixed by
    dy[0] > 0.  ``zeros`` are the n-1 interior zeros.
    """

    index: int
    lam: float
    grid: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    zeros: np.ndarray

    def value_at(self, x, with_derivative: bool = False):
        """Eigenfunction value (optionally derivative) between grid nodes,
        by cubic Hermite interpolation of the (y, dy) samples."""
        return hermite_eval(self.grid, self.y, self.dy, x, with_derivative)


@dataclass(frozen=True)
class Spectrum:
    density: Density
    pairs: tuple

    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])


def effective_steps(n: int, steps: int | None = None) -> int:
    base = _default_steps if steps is None else int(steps)
    if n > STEP_SCALE_INDEX:
        return int(math.ceil(base * n / STEP_SCALE_INDEX))
    return base


def _merge_breakpoints(uniform: np.ndarray, breaks) -> np.ndarray:
    if not breaks:
        return uniform
    extra = np.asarray([b for b in breaks if 0.0 < b < 1.0])
    return np.union1d(uniform, extra)


def _positive(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if not np.all(arr > 0.0):
        raise SolverError(f"density evaluation produced nonpositive {what}")
    return arr


@lru_cache(maxsize=32)
def _terminal_tables(d: Density, n_steps: int):
    """Pre-sampled density data for terminal-angle integrations."""
    nodes = _merge_breakpoints(np.linspace(0.0, 1.0, n_steps + 1), d.breakpoints)
    return _step_tables(d, nodes)


def _step_tables(d: Density, nodes: np.ndarray):
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    rho_l = _positive(d(nodes[:-1]), "rho")
    rho_m = _positive(d(mids), "rho")
    rho_r = _positive(d(nodes[1:]), "rho")
    if d.differentiable:
        g_l = np.asarray(d.derivative_sided(nodes[:-1], +1), dtype=float) / (4.0 * rho_l)
        g_m = np.asarray(d.derivative(mids), dtype=float) / (4.0 * rho_m)
        g_r = np.asarray(d.derivative_sided(nodes[1:], -1), dtype=float) / (4.0 * rho_r)
    else:
        g_l = g_m = g_r = None
    return nodes, rho_l, rho_m, rho_r, g_l, g_m, g_r


def prufer_terminal_angle(d: Density, lam: float, steps: int = DEFAULT_STEPS) -> float:
    """Terminal angle theta(1; lam) of the plain phase equation.

    Well defined for any real lam (including lam <= 0); strictly
    increasing in lam, with theta(1; lam_n) = n*pi at eigenvalues.
    """
    nodes, rho_l, rho_m, rho_r, *_ = _terminal_tables(d, int(steps))
    return _kernels.phase_terminal(nodes, rho_l, rho_m, rho_r, float(lam))


def _terminal(d: Density, lam: float, n_steps: int) -> float:
    """Phase angle at x=1 used for root-finding: scaled form when the
    density has a derivative, plain form otherwise."""
    nodes, rho_l, rho_m, rho_r, g_l, g_m, g_r = _terminal_tables(d, n_steps)
    if g_l is not None and lam > 0.0:
        return _kernels.scaled_terminal(nodes, rho_l, rho_m, rho_r,
                                        g_l, g_m, g_r, lam)
    return _kernels.phase_terminal(nodes, rho_l, rho_m, rho_r, lam)


def prufer_trace(d: Density, lam: float, steps: int = DEFAULT_STEPS) -> list[PruferState]:
    """States (x, theta, log r) of the plain phase flow along the step grid."""
    nodes, rho_l, rho_m, rho_r, *_ = _terminal_tables(d, int(steps))
    theta = np.empty_like(nodes)
    logr = np.empty_like(nodes)
    _kernels.phase_trace(nodes, rho_l, rho_m, rho_r, float(lam), theta, logr)
    return [PruferState(float(x), float(t), float(r))
            for x, t, r in zip(nodes, theta, logr)]


def eigenvalue(d: Density, n: int, rel_tol: float = DEFAULT_REL_TOL,
               steps: int | None = None) -> float:
    """n-th Dirichlet eigenvalue of -y'' = lam*rho*y (n >= 1)."""
    if n < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {n}")
    return _eigenvalue_cached(d, int(n), float(rel_tol), effective_steps(n, steps))


@lru_cache(maxsize=None)
def _eigenvalue_cached(d: Density, n: int, rel_tol: float, n_steps: int) -> float:
    target = n * math.pi
    lo_rho, hi_rho = d.bounds()
    if not (lo_rho > 0.0):
        raise SolverError(f"density lower bound {lo_rho} is not positive")
    lo = n * n * math.pi ** 2 / hi_rho * (1.0 - 1e-12)
    hi = n * n * math.pi ** 2 / lo_rho * (1.0 + 1e-12)

    f_lo = _terminal(d, lo, n_steps) - target
    expand = 0
    while f_lo >= 0.0:
        lo *= 0.5
        f_lo = _terminal(d, lo, n_steps) - target
        expand += 1
        if expand > 60:
            raise SolverError(f"cannot bracket eigenvalue {n} from below")
    f_hi = _terminal(d, hi, n_steps) - target
    expand = 0
    while f_hi <= 0.0:
        hi *= 2.0
        f_hi = _terminal(d, hi, n_steps) - target
        expand += 1
        if expand > 60:
            raise SolverError(f"cannot bracket eigenvalue {n} from above")

    # bisection: guaranteed by monotone dependence of the angle on lam
    while hi - lo > _BISECT_WIDTH * lo:
        mid = 0.5 * (lo + hi)
        f_mid = _terminal(d, mid, n_steps) - target
        if f_mid < 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    # secant polish, kept inside the bracket
    x_prev, f_prev = lo, f_lo
    x_cur, f_cur = hi, f_hi
    for _ in range(60):
        denom = f_cur - f_prev
        if denom != 0.0:
            x_new = x_cur - f_cur * (x_cur - x_prev) / denom
        else:
            x_new = 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        f_new = _terminal(d, x_new, n_steps) - target
        if f_new < 0.0:
            lo, f_lo = x_new, f_new
        else:
            hi, f_hi = x_new, f_new
        if abs(x_new - x_cur) <= rel_tol * x_new or f_new == 0.0:
            return x_new
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = x_new, f_new
        if hi - lo <= rel_tol * lo:
            break
    return 0.5 * (lo + hi)


def eigenfunction(d: Density, n: int, grid_size: int = DEFAULT_GRID,
                  rel_tol: float = DEFAULT_REL_TOL,
                  steps: int | None = None) -> Eigenpair:
    """Normalized n-th eigenfunction sampled on ``grid_size`` uniform points.

    ``grid_size`` is forced odd (composite Simpson normalization needs an
    odd node count).  Interior zeros are refined to 1e-12 by bisection on
    the phase crossing multiples of pi.
    """
    if n < 1:
        raise ValueError(f"eigenfunction index must be >= 1, got {n}")
    g = max(65, int(grid_size))
    if g % 2 == 0:
        g += 1
    return _eigenfunction_cached(d, int(n), g, float(rel_tol), effective_steps(n, steps))


@lru_cache(maxsize=256)
def _eigenfunction_cached(d: Density, n: int, grid_size: int,
                          rel_tol: float, n_steps: int) -> Eigenpair:
    lam = _eigenvalue_cached(d, n, rel_tol, n_steps)

    # integration grid: uniform refinement of the output grid, plus kinks
    k = max(1, round(n_steps / (grid_size - 1)))
    m_nodes = k * (grid_size - 1) + 1
    uniform = np.linspace(0.0, 1.0, m_nodes)
    nodes = _merge_breakpoints(uniform, d.breakpoints)
    nodes, rho_l, rho_m, rho_r, g_l, g_m, g_r = _step_tables(d, nodes)

    phase = np.empty_like(nodes)
    logr = np.empty_like(nodes)
    scaled = g_l is not None and lam > 0.0
    if scaled:
        _kernels.scaled_trace(nodes, rho_l, rho_m, rho_r, g_l, g_m, g_r,
                              lam, phase, logr)
    else:
        _kernels.phase_trace(nodes, rho_l, rho_m, rho_r, lam, phase, logr)

    rho_nodes = np.concatenate([rho_l, rho_r[-1:]])
    amp = np.exp(logr)
    y_raw = amp * np.sin(phase)
    if scaled:
        dy_raw = np.sqrt(lam * rho_nodes) * amp * np.cos(phase)
    else:
        dy_raw = amp * np.cos(phase)

    # Dirichlet endpoints hold exactly by construction
    y_raw[0] = 0.0
    y_raw[-1] = 0.0

    u_idx = np.searchsorted(nodes, uniform)
    y_u = y_raw[u_idx]
    dy_u = dy_raw[u_idx]
    breaks = [b for b in d.breakpoints if 0.0 < b < 1.0]
    if breaks:
        # rho*y^2 has kinks at the knots; splitting the quadrature there
        # keeps the normalization error at the 1e-11 level
        def rho_y2(xs):
            y = hermite_eval(uniform, y_u, dy_u, xs)
            return np.asarray(d(xs)) * y * y
        norm2 = segmented_simpson(rho_y2, [0.0] + breaks + [1.0],
                                  per_unit=2 * (m_nodes - 1), min_nodes=65)
    else:
        norm2 = simpson_uniform(d(uniform) * y_u * y_u, uniform[1] - uniform[0])
    if not (norm2 > 0.0):
        raise ConsistencyError(f"nonpositive normalization integral {norm2}")
    scale = 1.0 / math.sqrt(norm2)

    zeros = _phase_zeros(nodes, phase, rho_l, rho_r, g_l, g_r, lam, n, scaled)
    if len(zeros) != n - 1:
        raise ConsistencyError(
            f"eigenfunction {n} produced {len(zeros)} interior zeros, "
            f"expected {n - 1}; increase the step count")

    sl = slice(None, None, k)
    pair = Eigenpair(
        index=n,
        lam=lam,
        grid=uniform[sl].copy(),
        y=scale * y_u[sl],
        dy=scale * dy_u[sl],
        zeros=np.asarray(zeros),
    )
    for arr in (pair.grid, pair.y, pair.dy, pair.zeros):
        arr.setflags(write=False)
    return pair


def _phase_zeros(nodes, phase, rho_l, rho_r, g_l, g_r, lam, n, scaled):
    """Interior zeros of y: positions where the phase crosses k*pi.

    The phase is monotone through each multiple of pi, so each crossing is
    bracketed by consecutive nodes and refined by bisection on the cubic
    Hermite interpolant of the phase (endpoint slopes from the ODE).
    """
    zeros = []
    # the phase may dip locally between multiples of pi (scaled form with a
    # steep density), but never retreats across one; the running maximum is
    # monotone and locates the first upcrossing of each target
    envelope = np.maximum.accumulate(phase)
    for kk in range(1, n):
        target = kk * math.pi
        j = int(np.searchsorted(envelope, target))
        if j <= 0 or j >= len(phase):
            break
        x0, x1 = nodes[j - 1], nodes[j]
        f0, f1 = phase[j - 1], phase[j]
        if scaled:
            df0 = math.sqrt(lam * rho_l[j - 1]) + g_l[j - 1] * math.sin(2.0 * f0)
            df1 = math.sqrt(lam * rho_r[j - 1]) + g_r[j - 1] * math.sin(2.0 * f1)
        else:
            s0, c0 = math.sin(f0), math.cos(f0)
            s1, c1 = math.sin(f1), math.cos(f1)
            df0 = c0 * c0 + lam * rho_l[j - 1] * s0 * s0
            df1 = c1 * c1 + lam * rho_r[j - 1] * s1 * s1
        zeros.append(hermite_root(x0, x1, f0, f1, df0, df1, target=target))
    return zeros


def spectrum(d: Density, n_max: int, grid_size: int = DEFAULT_GRID,
             rel_tol: float = DEFAULT_REL_TOL, steps: int | None = None) -> Spectrum:
    """Eigenpairs 1..n_max with ordering and interlacing invariants checked."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    pairs = tuple(eigenfunction(d, n, grid_size, rel_tol, steps)
                  for n in range(1, n_max + 1))
    lams = [p.lam for p in pairs]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ConsistencyError(f"eigenvalues not strictly increasing: {lams}")
    for lo_pair, hi_pair in zip(pairs, pairs[1:]):
        if not zeros_interlace(hi_pair.zeros, lo_pair.zeros):
            raise ConsistencyError(
                f"zeros of modes {lo_pair.index} and {hi_pair.index} do not interlace")
    return Spectrum(density=d, pairs=pairs)


def zeros_interlace(upper: np.ndarray, lower: np.ndarray) -> bool:
    """Whether w_1 < v_1 < w_2 < ... < v_k < w_{k+1} for the zero sets of
    consecutive modes (``upper`` has one more zero than ``lower``)."""
    if len(upper) != len(lower) + 1:
        return False
    merged = np.empty(len(upper) + len(lower))
    merged[0::2] = upper
    merged[1::2] = lower
    return bool(np.all(np.diff(merged) > 0.0))
