"""Numerical verification harness.

Every spectral claim handled here follows the same recipe: compute the two
sides of an inequality or identity with the shooting solver, attach an
explicit margin and tolerance, and emit a :class:`VerificationReport` row.
Margins are oriented so that ``pass`` always means ``margin >= -tolerance``:

* inequality claims report ``margin = LHS - RHS`` in natural units;
* agreement claims report ``margin = -relative_disagreement``;
* boolean (structural) claims report ``margin = +1`` or ``-1`` with zero
  tolerance;
* strictness claims may carry a *negative* tolerance, which turns the pass
  condition into ``margin >= |tolerance|``.

Out-of-hypothesis inputs (non-concave densities fed to a concave-density
bound) are computed rather than rejected; the row keeps ``in_hypothesis =
False`` so harness exit codes can ignore it while the number remains
available as evidence that the checks are not vacuous.

All quadratures use composite Simpson on the eigenfunction grid, with one
grid-doubling refinement; the reported tolerance is the larger of the
claim target and twice the refinement delta.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from numpy.polynomial import polynomial as npoly

import numpy as np

from ._interp import hermite_eval, odd, simpson_uniform
from .density import (
    ConstantDensity,
    Density,
    DensityError,
    HomotopyFamily,
    LinearDensity,
    density_max,
    hat_interpolant,
    is_concave,
    make_constant,
    make_linear,
    make_piecewise_linear,
    make_quadratic,
)
from .prufer import (
    DEFAULT_GRID,
    ConsistencyError,
    Eigenpair,
    Spectrum,
    eigenfunction,
    eigenvalue,
    spectrum,
    zeros_interlace,
)

RATIO_TOL = 1e-8
GAP_TOL_UNIT = 1e-8           # scaled by (m*pi)^2 per row
KELLER_REL_TOL = 1e-4
HUANG_REL_TOL = 1e-6
HOMOTOPY_STEP_TOL = 1e-9
CROSSING_TOL = 1e-8
FD_H = 1e-4                   # central-difference step in tau
FD_REL_TOL = 1e-12            # solver tolerance for derivative probes
DEFAULT_SEED = 42


@dataclass(frozen=True)
class VerificationReport:
    """One claim evaluation: pass iff margin >= -tolerance."""

    claim: str
    density_digest: str
    n: int | None
    m: int | None
    tau: float | None
    margin: float
    tolerance: float
    passed: bool
    runtime_ms: float
    in_hypothesis: bool = True


def _report(claim, digest, n, m, tau, margin, tolerance, t0, in_hypothesis=True):
    margin = float(margin)
    return VerificationReport(
        claim=claim, density_digest=digest, n=n, m=m, tau=tau,
        margin=margin, tolerance=float(tolerance),
        passed=bool(margin >= -tolerance),
        runtime_ms=(time.perf_counter() - t0) * 1e3,
        in_hypothesis=bool(in_hypothesis),
    )


@dataclass(frozen=True)
class CrossingAnalysis:
    """Squared-amplitude crossings of modes n and n-1.

    ``per_interval`` holds (z_lo, z_hi, value) for each interval between
    consecutive zeros of mode n-1 (endpoints included), where value is the
    integral of x*(y_{n-1}^2 - y_n^2) over the interval.  ``crossings``
    lists the two points per interval where the squares are equal.
    """

    n: int
    crossings: tuple
    per_interval: tuple
    total: float
    quad_error: float
    pattern_ok: bool
    ordering_ok: bool


# ---------------------------------------------------------------------------
# ratio and gap bounds
# ---------------------------------------------------------------------------

def check_ratio_bound(d: Density, n_max: int, grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    """Rows for lam_n/lam_m >= (n/m)^2 over all pairs n > m <= n_max."""
    in_hyp = is_concave(d)
    lams = [eigenvalue(d, n) for n in range(1, n_max + 1)]
    rows = []
    for n in range(2, n_max + 1):
        for m in range(1, n):
            t0 = time.perf_counter()
            margin = lams[n - 1] / lams[m - 1] - (n / m) ** 2
            rows.append(_report("ratio", d.digest, n, m, None,
                                margin, RATIO_TOL, t0, in_hyp))
    return rows


def check_gap_bound(d: Density, n_max: int) -> list[VerificationReport]:
    """Rows for lam_n - lam_m >= ((n/m)^2 - 1) (m*pi)^2 / max(rho)."""
    in_hyp = is_concave(d)
    rho_max = density_max(d)
    lams = [eigenvalue(d, n) for n in range(1, n_max + 1)]
    rows = []
    for n in range(2, n_max + 1):
        for m in range(1, n):
            t0 = time.perf_counter()
            bound = ((n / m) ** 2 - 1.0) * (m * math.pi) ** 2 / rho_max
            margin = (lams[n - 1] - lams[m - 1]) - bound
            rows.append(_report("gap", d.digest, n, m, None,
                                margin, GAP_TOL_UNIT * (m * math.pi) ** 2,
                                t0, in_hyp))
    return rows


# ---------------------------------------------------------------------------
# eigenvalue derivative along a family (Keller) and the ratio derivative
# ---------------------------------------------------------------------------

def _weighted_mode_integral(d: Density, n: int, weight, grid_size: int):
    """integral of weight(x)*u_n(x)^2 dx with one grid-doubling refinement.

    Returns (value, delta); value is the fine-grid Simpson result.
    """
    coarse = eigenfunction(d, n, grid_size)
    fine = eigenfunction(d, n, 2 * grid_size - 1)

    def integrate(pair):
        w = np.asarray(weight(pair.grid), dtype=float)
        return simpson_uniform(w * pair.y ** 2, pair.grid[1] - pair.grid[0])

    i_c = integrate(coarse)
    i_f = integrate(fine)
    return i_f, abs(i_f - i_c)


def _family_fd_step(family: HomotopyFamily, tau: float) -> float:
    """Largest workable central-difference step at tau (shrinks near the
    family's domain boundary)."""
    h = FD_H
    for _ in range(24):
        try:
            family.density_at(tau + h)
            family.density_at(tau - h)
            return h
        except DensityError:
            h *= 0.5
    raise DensityError(f"no usable finite-difference step at tau={tau}")


def keller_derivative(family: HomotopyFamily, tau: float, n: int,
                      grid_size: int = DEFAULT_GRID) -> tuple[float, float]:
    """d(lam_n)/d(tau) two ways: quadrature formula and central difference.

    Formula: -lam_n(tau) * integral of (d rho/d tau) u_n^2 dx, valid under
    the normalization integral rho u_n^2 = 1.  The central difference uses
    step 1e-4 (shrunk if tau +/- h leaves the family domain) and a tighter
    solver tolerance so differencing noise stays below the 1e-4 agreement
    target.
    """
    d_tau = family.density_at(tau)
    lam = eigenvalue(d_tau, n, rel_tol=FD_REL_TOL)
    integral, _ = _weighted_mode_integral(
        d_tau, n, lambda x: family.drho_dtau(x, tau), grid_size)
    formula = -lam * integral

    h = _family_fd_step(family, tau)
    lam_plus = eigenvalue(family.density_at(tau + h), n, rel_tol=FD_REL_TOL)
    lam_minus = eigenvalue(family.density_at(tau - h), n, rel_tol=FD_REL_TOL)
    fd = (lam_plus - lam_minus) / (2.0 * h)
    return formula, fd


def ratio_derivative(family: HomotopyFamily, tau: float, n: int, m: int,
                     grid_size: int = DEFAULT_GRID) -> float:
    """d/d tau of lam_n/lam_m along the family:
    (lam_n/lam_m) * integral of (d rho/d tau) (u_m^2 - u_n^2) dx."""
    if not (n > m >= 1):
        raise ValueError(f"need n > m >= 1, got n={n}, m={m}")
    d_tau = family.density_at(tau)
    lam_n = eigenvalue(d_tau, n, rel_tol=FD_REL_TOL)
    lam_m = eigenvalue(d_tau, m, rel_tol=FD_REL_TOL)
    i_m, _ = _weighted_mode_integral(
        d_tau, m, lambda x: family.drho_dtau(x, tau), grid_size)
    i_n, _ = _weighted_mode_integral(
        d_tau, n, lambda x: family.drho_dtau(x, tau), grid_size)
    return (lam_n / lam_m) * (i_m - i_n)


def _ratio_derivative_fd(family: HomotopyFamily, tau: float, n: int, m: int) -> float:
    h = _family_fd_step(family, tau)

    def ratio(t):
        d_t = family.density_at(t)
        return (eigenvalue(d_t, n, rel_tol=FD_REL_TOL)
                / eigenvalue(d_t, m, rel_tol=FD_REL_TOL))

    return (ratio(tau + h) - ratio(tau - h)) / (2.0 * h)


def _agreement_margin(a: float, b: float, scale_floor: float) -> float:
    """Negative relative disagreement, with a scale floor so that
    near-stationary values are compared on the natural problem scale."""
    return -abs(a - b) / max(abs(a), abs(b), scale_floor)


def hat_chord_family(d: Density) -> HomotopyFamily:
    """Affine family from the endpoint chord of ``d`` up to ``d`` itself."""
    return HomotopyFamily("affine", start=hat_interpolant(d, (0.0, 1.0)), end=d)


def check_keller(d: Density, n_max: int,
                 taus=(0.25, 0.5, 0.75),
                 grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    """Formula-vs-difference rows for the chord-to-density family of ``d``.

    Emits `keller.formula` rows for n <= min(n_max, 5) and `keller.ratio`
    rows (the ratio-derivative identity) for consecutive pairs.
    """
    fam = hat_chord_family(d)
    rows = []
    for tau in taus:
        d_tau = fam.density_at(tau)
        for n in range(1, min(n_max, 5) + 1):
            t0 = time.perf_counter()
            formula, fd = keller_derivative(fam, tau, n, grid_size)
            lam = eigenvalue(d_tau, n)
            margin = _agreement_margin(formula, fd, 1e-3 * lam)
            rows.append(_report("keller.formula", d.digest, n, None, tau,
                                margin, KELLER_REL_TOL, t0))
        for n, m in [(2, 1), (3, 2)]:
            if n > n_max:
                continue
            t0 = time.perf_counter()
            value = ratio_derivative(fam, tau, n, m, grid_size)
            fd = _ratio_derivative_fd(fam, tau, n, m)
            ratio_scale = (eigenvalue(d_tau, n) / eigenvalue(d_tau, m))
            margin = _agreement_margin(value, fd, 1e-3 * ratio_scale)
            rows.append(_report("keller.ratio", d.digest, n, m, tau,
                                margin, KELLER_REL_TOL, t0))
    return rows


# ---------------------------------------------------------------------------
# boundary identity for polynomial test functions
# ---------------------------------------------------------------------------

def huang_identity_residual(d: Density, n: int, g,
                            grid_size: int = DEFAULT_GRID) -> float:
    """Absolute residual of the boundary identity

        g(1) y'(1)^2 - g(0) y'(0)^2
            = integral of [2 lam g' rho + lam g rho' + g'''/2] y^2 dx

    for a polynomial test function ``g`` (coefficient sequence, ascending,
    degree <= 4).  The density must be differentiable; piecewise-linear
    kinds use their per-piece slope.
    """
    lhs, rhs, _ = _huang_parts(d, n, g, grid_size)
    return abs(lhs - rhs)


def _segments(d: Density) -> list[tuple[float, float]]:
    """Smoothness intervals of the density: [0,1] split at its kinks."""
    edges = [0.0] + [b for b in d.breakpoints if 0.0 < b < 1.0] + [1.0]
    return list(zip(edges[:-1], edges[1:]))


def _segmented_integral(d: Density, pair: Eigenpair, weight) -> float:
    """integral of weight(x, rho(x), rho'(x)) * y(x)^2 dx, splitting the
    quadrature at the density's kinks.

    The derivative of the density jumps at its breakpoints; integrating
    each smooth piece on its own Simpson subgrid keeps fourth-order
    convergence (a jump crossed mid-cell would degrade Simpson to first
    order).  The eigenfunction is evaluated by cubic Hermite interpolation
    of the pair samples.
    """
    density_per_cell = pair.grid.shape[0] - 1
    total = 0.0
    for a, b in _segments(d):
        nodes = odd(max(33, int(round((b - a) * density_per_cell)) + 1))
        xs = np.linspace(a, b, nodes)
        rho = np.asarray(d(xs), dtype=float)
        drho = np.asarray(d.derivative_sided(xs, +1), dtype=float)
        # the right endpoint belongs to this piece, not the next
        drho[-1] = float(np.asarray(d.derivative_sided(np.array([b]), -1))[0])
        y = pair.value_at(xs)
        total += simpson_uniform(weight(xs, rho, drho) * y * y, xs[1] - xs[0])
    return total


def _huang_parts(d: Density, n: int, g, grid_size: int):
    coeffs = np.atleast_1d(np.asarray(g, dtype=float))
    if coeffs.ndim != 1 or coeffs.shape[0] > 5:
        raise ValueError("test function must be a polynomial of degree <= 4")
    if not d.differentiable:
        raise DensityError(
            f"boundary identity needs a differentiable density, got kind {d.kind!r}")
    dg = npoly.polyder(coeffs)
    dddg = npoly.polyder(coeffs, 3)

    coarse = eigenfunction(d, n, grid_size)
    fine = eigenfunction(d, n, 2 * grid_size - 1)
    lam = fine.lam

    def weight(x, rho, drho):
        return (2.0 * lam * npoly.polyval(x, dg) * rho
                + lam * npoly.polyval(x, coeffs) * drho
                + 0.5 * npoly.polyval(x, dddg))

    rhs_c = _segmented_integral(d, coarse, weight)
    rhs_f = _segmented_integral(d, fine, weight)
    lhs = (npoly.polyval(1.0, coeffs) * fine.dy[-1] ** 2
           - npoly.polyval(0.0, coeffs) * fine.dy[0] ** 2)
    return float(lhs), float(rhs_f), abs(rhs_f - rhs_c)


def normalization_residual(d: Density, pair: Eigenpair) -> float:
    """|integral of rho y^2 - 1| by an independent fine quadrature
    (Hermite-interpolated mode on kink-split Simpson subgrids at four
    times the pair resolution)."""
    density_per_cell = 4 * (pair.grid.shape[0] - 1)
    total = 0.0
    for a, b in _segments(d):
        nodes = odd(max(65, int(round((b - a) * density_per_cell)) + 1))
        xs = np.linspace(a, b, nodes)
        y = pair.value_at(xs)
        total += simpson_uniform(np.asarray(d(xs)) * y * y, xs[1] - xs[0])
    return abs(total - 1.0)


STANDARD_TEST_FUNCTIONS = (
    ("1", (1.0,)),
    ("x", (0.0, 1.0)),
    ("x^2", (0.0, 0.0, 1.0)),
    ("x^3", (0.0, 0.0, 0.0, 1.0)),
)


def check_identity(d: Density, n_max: int,
                   grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    """Boundary-identity rows for g in {1, x, x^2, x^3}, n <= min(n_max, 5).

    The m column encodes the polynomial degree of g.
    """
    rows = []
    for n in range(1, min(n_max, 5) + 1):
        for name, coeffs in STANDARD_TEST_FUNCTIONS:
            t0 = time.perf_counter()
            lhs, rhs, delta = _huang_parts(d, n, coeffs, grid_size)
            tol = max(HUANG_REL_TOL * max(abs(lhs), 1.0), 2.0 * delta)
            rows.append(_report("identity", d.digest, n, len(coeffs) - 1, None,
                                -abs(lhs - rhs), tol, t0))
    return rows


# ---------------------------------------------------------------------------
# crossings of consecutive squared eigenfunctions
# ---------------------------------------------------------------------------

def crossing_analysis(d: Density, n: int,
                      grid_size: int = DEFAULT_GRID,
                      interval_nodes: int = 513) -> CrossingAnalysis:
    """Crossing points and x-weighted difference integrals for modes n, n-1.

    Raises :class:`ConsistencyError` when an interval does not contain
    exactly two crossings (an under-resolution signal).  The expected sign
    pattern (mode n dominating near the interval ends, mode n-1 in the
    middle band) and the ordering of crossings around the interior zero of
    mode n are recorded as booleans.
    """
    if n < 2:
        raise ValueError(f"crossing analysis needs n >= 2, got {n}")
    hi = eigenfunction(d, n, grid_size)
    lo = eigenfunction(d, n - 1, grid_size)
    edges = np.concatenate([[0.0], lo.zeros, [1.0]])

    crossings = []
    per_interval = []
    total = 0.0
    quad_err = 0.0
    pattern_ok = True
    ordering_ok = True

    for a, b in zip(edges[:-1], edges[1:]):
        xs = np.linspace(a, b, odd(interval_nodes))
        y_hi = hermite_eval(hi.grid, hi.y, hi.dy, xs)
        y_lo = hermite_eval(lo.grid, lo.y, lo.dy, xs)
        diff = y_hi ** 2 - y_lo ** 2

        flips = np.nonzero(diff[:-1] * diff[1:] < 0.0)[0]
        if len(flips) != 2:
            raise ConsistencyError(
                f"interval ({a:.6f}, {b:.6f}) of mode pair ({n}, {n - 1}) has "
                f"{len(flips)} crossings, expected 2")
        pair = []
        for j in flips:
            pair.append(_refine_crossing(hi, lo, xs[j], xs[j + 1]))
        crossings.extend(pair)

        # sign pattern: positive band, negative band, positive band
        scale = float(np.max(np.abs(diff)))
        band_tol = 1e-9 * scale
        x1, x2 = pair
        inner = xs[(xs > a) & (xs < x1)]
        middle = xs[(xs > x1) & (xs < x2)]
        outer = xs[(xs > x2) & (xs < b)]
        if (np.any(hermite_eval(hi.grid, hi.y, hi.dy, inner) ** 2
                   - hermite_eval(lo.grid, lo.y, lo.dy, inner) ** 2 < -band_tol)
                or np.any(hermite_eval(hi.grid, hi.y, hi.dy, middle) ** 2
                          - hermite_eval(lo.grid, lo.y, lo.dy, middle) ** 2 > band_tol)
                or np.any(hermite_eval(hi.grid, hi.y, hi.dy, outer) ** 2
                          - hermite_eval(lo.grid, lo.y, lo.dy, outer) ** 2 < -band_tol)):
            pattern_ok = False

        # the interior zero of mode n in this interval sits between the crossings
        inside = hi.zeros[(hi.zeros > a) & (hi.zeros < b)]
        if len(inside) != 1 or not (x1 < inside[0] < x2):
            ordering_ok = False

        value, delta = _interval_weighted_integral(hi, lo, a, b, interval_nodes)
        per_interval.append((float(a), float(b), value))
        total += value
        quad_err += delta

    return CrossingAnalysis(
        n=n, crossings=tuple(crossings), per_interval=tuple(per_interval),
        total=total, quad_error=quad_err,
        pattern_ok=pattern_ok, ordering_ok=ordering_ok,
    )


def _refine_crossing(hi: Eigenpair, lo: Eigenpair, x0: float, x1: float) -> float:
    def diff_sq(x):
        arr = np.asarray([x])
        a = hermite_eval(hi.grid, hi.y, hi.dy, arr)[0]
        b = hermite_eval(lo.grid, lo.y, lo.dy, arr)[0]
        return a * a - b * b

    f0 = diff_sq(x0)
    a, b = x0, x1
    for _ in range(100):
        if b - a <= 1e-13:
            break
        mid = 0.5 * (a + b)
        fm = diff_sq(mid)
        if fm == 0.0:
            return mid
        if (f0 < 0.0) == (fm < 0.0):
            a, f0 = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _interval_weighted_integral(hi: Eigenpair, lo: Eigenpair,
                                a: float, b: float, nodes: int):
    def integrate(k):
        xs = np.linspace(a, b, odd(k))
        y_hi = hermite_eval(hi.grid, hi.y, hi.dy, xs)
        y_lo = hermite_eval(lo.grid, lo.y, lo.dy, xs)
        return simpson_uniform(xs * (y_lo ** 2 - y_hi ** 2), xs[1] - xs[0])

    coarse = integrate(nodes)
    fine = integrate(2 * nodes - 1)
    return fine, abs(fine - coarse)


def check_crossings(d: Density, n_max: int,
                    grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    """Crossing rows for n in 2..min(n_max, 5).

    `crossings.pattern` is boolean (sign structure and crossing ordering);
    `crossings.total` asserts the x-weighted difference integral is
    nonnegative, which is guaranteed only for linear densities (other kinds
    are recorded out-of-hypothesis).
    """
    rows = []
    linear_kind = isinstance(d, (ConstantDensity, LinearDensity))
    for n in range(2, min(n_max, 5) + 1):
        t0 = time.perf_counter()
        analysis = crossing_analysis(d, n, grid_size)
        structural = 1.0 if (analysis.pattern_ok and analysis.ordering_ok) else -1.0
        rows.append(_report("crossings.pattern", d.digest, n, None, None,
                            structural, 0.0, t0))
        t0 = time.perf_counter()
        tol = max(CROSSING_TOL, 2.0 * analysis.quad_error)
        rows.append(_report("crossings.total", d.digest, n, None, None,
                            analysis.total, tol, t0, in_hypothesis=linear_kind))
    return rows


# ---------------------------------------------------------------------------
# homotopy monotonicity
# ---------------------------------------------------------------------------

def homotopy_monotonicity(rho: Density, n: int, steps: int = 21,
                          grid_size: int = DEFAULT_GRID) -> VerificationReport:
    """Monotonicity of lam_n/lam_{n-1} along the blend from the chordal
    interpolant of ``rho`` (at the zeros of its own mode n-1) up to ``rho``.

    The margin is the smallest successive difference of the ratio over a
    uniform tau grid; non-decreasing within 1e-9 per step is a pass.
    """
    if n < 2:
        raise ValueError(f"homotopy check needs n >= 2, got {n}")
    t0 = time.perf_counter()
    anchor = eigenfunction(rho, n - 1, grid_size)
    rho_hat = hat_interpolant(rho, np.concatenate([[0.0], anchor.zeros, [1.0]]))
    family = HomotopyFamily("affine", start=rho_hat, end=rho)
    taus = np.linspace(0.0, 1.0, steps)
    ratios = []
    for tau in taus:
        d_tau = family.density_at(float(tau))
        ratios.append(eigenvalue(d_tau, n) / eigenvalue(d_tau, n - 1))
    margin = float(np.min(np.diff(ratios))) if len(ratios) > 1 else 0.0
    return _report("homotopy.blend", rho.digest, n, None, None,
                   margin, HOMOTOPY_STEP_TOL, t0, in_hypothesis=is_concave(rho))


def linear_family_monotonicity(intercept: float, n: int,
                               taus=None, rel_tol: float = 1e-10) -> VerificationReport:
    """Strict growth of lam_n/lam_{n-1} along rho = tau*x + intercept.

    The margin is the smallest successive ratio difference over the tau
    grid (default 0, 0.2, ..., 2).  The tolerance is *negative*: passing
    requires every difference to exceed ten times the solver tolerance.
    """
    if taus is None:
        taus = np.arange(0.0, 2.0 + 1e-12, 0.2)
    t0 = time.perf_counter()
    family = HomotopyFamily("linear_slope", intercept=float(intercept))
    ratios = []
    for tau in taus:
        d_tau = family.density_at(float(tau))
        ratios.append(eigenvalue(d_tau, n, rel_tol=rel_tol)
                      / eigenvalue(d_tau, n - 1, rel_tol=rel_tol))
    margin = float(np.min(np.diff(ratios)))
    strict_floor = 10.0 * rel_tol * max(ratios)
    return _report("homotopy.linear", family.digest, n, None, float(intercept),
                   margin, -strict_floor, t0)


def check_homotopy(d: Density, n_max: int, steps: int = 21,
                   grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    rows = [homotopy_monotonicity(d, n, steps, grid_size)
            for n in range(2, min(n_max, 4) + 1)]
    rows.extend(linear_family_monotonicity(1.0, n)
                for n in range(2, min(n_max, 4) + 1))
    return rows


# ---------------------------------------------------------------------------
# interlacing and Wronskian structure
# ---------------------------------------------------------------------------

def interlacing_check(s: Spectrum) -> VerificationReport:
    """Zero interlacing plus the comparison ordering for every consecutive
    pair of the spectrum (boolean row)."""
    t0 = time.perf_counter()
    ok = True
    for a, b in zip(s.pairs, s.pairs[1:]):
        if not zeros_interlace(b.zeros, a.zeros):
            ok = False
    for pair in s.pairs:
        if len(pair.zeros) != pair.index - 1:
            ok = False
        if np.any(pair.zeros <= 0.0) or np.any(pair.zeros >= 1.0):
            ok = False
    return _report("interlacing", s.density.digest,
                   len(s.pairs), None, None,
                   1.0 if ok else -1.0, 0.0, t0)


def wronskian_max(lo: Eigenpair, hi: Eigenpair, margin: int = 4) -> float:
    """Maximum of w = u_n' u_{n-1} - u_{n-1}' u_n over the interior grid.

    Strictly negative w means u_n/u_{n-1} is strictly decreasing wherever
    it is defined.  ``margin`` grid cells are trimmed at each endpoint,
    where both modes vanish and w -> 0.
    """
    w = hi.dy * lo.y - lo.dy * hi.y
    return float(np.max(w[margin:-margin]))


# ---------------------------------------------------------------------------
# density corpus
# ---------------------------------------------------------------------------

def reference_corpus() -> list[tuple[str, Density]]:
    """Named mixed corpus: constants, linears, quadratics (both signs of
    curvature), piecewise-linear tents and a non-concave valley."""
    tent6 = make_piecewise_linear(
        [0.0, 0.15, 0.35, 0.55, 0.75, 1.0],
        [0.8, 1.5, 1.9, 2.0, 1.7, 0.9])
    return [
        ("const_1", make_constant(1.0)),
        ("const_2", make_constant(2.0)),
        ("const_half", make_constant(0.5)),
        ("linear_up", make_linear(1.0, 1.0)),
        ("linear_steep", make_linear(2.0, 0.5)),
        ("linear_down", make_linear(-0.8, 1.2)),
        ("quad_bump", make_quadratic(-4.0, 4.0, 1.0)),      # 1 + 4x(1-x)
        ("quad_concave_tilt", make_quadratic(-1.0, 1.0, 1.0)),
        ("quad_gentle", make_quadratic(-0.5, 0.0, 1.5)),
        ("quad_convex_well", make_quadratic(4.0, -4.0, 2.0)),  # 1 + 4(x-1/2)^2
        ("quad_convex_tilt", make_quadratic(1.0, -1.0, 1.3)),
        ("tent_mid", make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 2.0, 1.0])),
        ("tent_skew", make_piecewise_linear([0.0, 0.3, 1.0], [0.7, 1.8, 1.1])),
        ("pw_concave_4", make_piecewise_linear(
            [0.0, 0.25, 0.6, 1.0], [1.0, 1.8, 2.1, 1.5])),
        ("pw_concave_6", tent6),
        ("pw_valley", make_piecewise_linear([0.0, 0.5, 1.0], [2.0, 1.0, 2.0])),
        ("linear_b_half", make_linear(1.0, 0.5)),
        ("linear_b_two", make_linear(1.0, 2.0)),
        ("quad_wide", make_quadratic(-2.0, 2.0, 1.2)),
        ("quad_asym", make_quadratic(-2.5, 1.5, 1.2)),
        ("pw_plateau", make_piecewise_linear(
            [0.0, 0.2, 0.8, 1.0], [1.0, 1.6, 1.6, 1.1])),
        ("const_4", make_constant(4.0)),
        ("linear_shallow", make_linear(0.25, 0.9)),
        ("quad_peak_left", make_quadratic(-1.8, 1.2, 1.0)),
    ]


def random_concave_corpus(count: int = 200, seed: int = DEFAULT_SEED) -> list[Density]:
    """Seeded random concave densities: linears, concave quadratics, and
    concave piecewise-linear profiles with up to six knots (built from
    decreasing slope sequences)."""
    rng = np.random.default_rng(seed)
    out: list[Density] = []
    while len(out) < count:
        kind = rng.choice(("linear", "quadratic", "piecewise"),
                          p=(0.25, 0.35, 0.40))
        if kind == "linear":
            slope = rng.uniform(-2.0, 3.0)
            intercept = rng.uniform(0.4, 2.0) + max(0.0, -slope)
            out.append(make_linear(slope, intercept))
        elif kind == "quadratic":
            xv = rng.uniform(0.0, 1.0)
            peak = rng.uniform(1.0, 3.0)
            reach = max((1.0 - xv) ** 2, xv ** 2)
            a = -rng.uniform(0.2, 1.0) * (peak - 0.3) / reach
            out.append(make_quadratic(a, -2.0 * a * xv, peak + a * xv * xv))
        else:
            k_int = int(rng.integers(1, 5))
            for _ in range(50):
                interior = np.sort(rng.uniform(0.06, 0.94, k_int))
                if k_int == 1 or np.min(np.diff(interior)) >= 0.05:
                    break
            knots = np.concatenate([[0.0], interior, [1.0]])
            slopes = np.sort(rng.uniform(-3.0, 3.0, k_int + 1))[::-1]
            values = np.empty(k_int + 2)
            values[0] = rng.uniform(0.5, 2.0)
            for i, s in enumerate(slopes):
                values[i + 1] = values[i] + s * (knots[i + 1] - knots[i])
            lift = max(0.0, 0.3 - values.min())
            out.append(make_piecewise_linear(knots, values + lift))
    return out


def random_sl_pairs(count: int = 20, seed: int = DEFAULT_SEED) -> list[tuple[Density, Density]]:
    """Seeded random (p, rho) pairs for the Sturm-Liouville route, mixing
    pairs whose product p*rho is concave in x with pairs where it is not."""
    rng = np.random.default_rng(seed)
    pairs = []

    def concave_quad():
        xv = rng.uniform(0.2, 0.8)
        peak = rng.uniform(1.2, 2.5)
        a = -rng.uniform(0.3, 1.0) * (peak - 0.4) / max((1.0 - xv) ** 2, xv ** 2)
        return make_quadratic(a, -2.0 * a * xv, peak + a * xv * xv)

    while len(pairs) < count:
        style = len(pairs) % 4
        if style == 0:
            p = make_constant(rng.uniform(0.5, 3.0))
            rho = concave_quad()
        elif style == 1:
            s = rng.uniform(0.2, 1.2)
            p = make_linear(s, rng.uniform(0.6, 1.5))
            rho = make_linear(-rng.uniform(0.1, 0.6), rng.uniform(1.2, 2.0))
        elif style == 2:
            p = concave_quad()
            rho = make_constant(rng.uniform(0.5, 2.0))
        else:
            p = make_linear(rng.uniform(0.3, 1.5), rng.uniform(0.6, 1.2))
            rho = make_linear(rng.uniform(0.2, 1.0), rng.uniform(0.5, 1.0))
        pairs.append((p, rho))
    return pairs


def relative_variation(d: Density) -> float:
    lo, hi = d.bounds()
    return (hi - lo) / lo


# ---------------------------------------------------------------------------
# claim registry and serialization
# ---------------------------------------------------------------------------

CLAIMS = ("ratio", "gap", "keller", "identity", "crossings", "homotopy",
          "interlacing")


def run_claims(d: Density, claims, n_max: int, tau_steps: int = 21,
               grid_size: int = DEFAULT_GRID) -> list[VerificationReport]:
    """All report rows for the selected claims against one density."""
    selected = list(CLAIMS) if "all" in claims else list(claims)
    unknown = [c for c in selected if c not in CLAIMS]
    if unknown:
        raise ValueError(f"unknown claims {unknown}; valid: {CLAIMS} or 'all'")
    rows: list[VerificationReport] = []
    for claim in selected:
        if claim == "ratio":
            rows.extend(check_ratio_bound(d, n_max))
        elif claim == "gap":
            rows.extend(check_gap_bound(d, n_max))
        elif claim == "keller":
            rows.extend(check_keller(d, n_max))
        elif claim == "identity":
            if d.differentiable:
                rows.extend(check_identity(d, n_max))
        elif claim == "crossings":
            if n_max >= 2:
                rows.extend(check_crossings(d, n_max))
        elif claim == "homotopy":
            if n_max >= 2:
                rows.extend(check_homotopy(d, n_max))
        elif claim == "interlacing":
            rows.append(interlacing_check(spectrum(d, max(n_max, 2))))
    return sort_reports(rows)


def sort_reports(rows) -> list[VerificationReport]:
    def key(r: VerificationReport):
        return (r.claim, r.density_digest,
                r.n if r.n is not None else -1,
                r.m if r.m is not None else -1,
                r.tau if r.tau is not None else -1.0)
    return sorted(rows, key=key)


CSV_HEADER = "claim,density_digest,n,m,tau,margin,tolerance,pass,runtime_ms"


def report_csv_row(r: VerificationReport) -> str:
    return ",".join([
        r.claim, r.density_digest,
        "" if r.n is None else str(r.n),
        "" if r.m is None else str(r.m),
        "" if r.tau is None else repr(float(r.tau)),
        repr(r.margin), repr(r.tolerance),
        "true" if r.passed else "false",
        f"{r.runtime_ms:.3f}",
    ])


def report_json_obj(r: VerificationReport) -> dict:
    return {
        "claim": r.claim,
        "density_digest": r.density_digest,
        "n": r.n,
        "m": r.m,
        "tau": r.tau,
        "margin": r.margin,
        "tolerance": r.tolerance,
        "pass": r.passed,
        "runtime_ms": round(r.runtime_ms, 3),
        "in_hypothesis": r.in_hypothesis,
    }
