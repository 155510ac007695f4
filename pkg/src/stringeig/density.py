"""Coefficient functions on [0, 1].

A :class:`Density` is a strictly positive, continuous function on the unit
interval, given in closed parametric form and evaluated on demand (never
pre-sampled), so integrators can query it at their own nodes without
interpolation error.  Supported kinds: constant, linear, quadratic,
piecewise-linear, and products of two densities.  A small set of
constructors validates positivity; every density carries a verified lower
bound ``floor``.

The module also provides concavity testing, chordal (piecewise-linear)
interpolants, and one-parameter homotopy families (affine blends between
two densities, and the slope-parameterized linear family tau*x + b).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Constructors reject densities whose infimum falls below this; keeps the
# eigenproblem uniformly elliptic.
MIN_FLOOR = 1e-8

# Default slack for midpoint concavity checks on smooth kinds.
CONCAVITY_TOL = 1e-10


class DensityError(ValueError):
    """Invalid density construction or evaluation request."""


def _digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


class Density:
    """Positive coefficient function on [0, 1].

    Instances are immutable and hashable (by canonical parameter digest),
    hence safe to share across workers and to use as cache keys.
    """

    kind: str = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        """Pointwise derivative (a.e. for piecewise kinds)."""
        raise DensityError(f"density kind {self.kind!r} has no derivative")

    def derivative_sided(self, x, side: int):
        """One-sided derivative: right limit for side=+1, left for side=-1.

        Only piecewise kinds distinguish sides; smooth kinds fall back to
        :meth:`derivative`.
        """
        return self.derivative(x)

    @property
    def differentiable(self) -> bool:
        """True if :meth:`derivative` is available (a.e. for piecewise kinds)."""
        return False

    @property
    def breakpoints(self) -> tuple:
        """Interior points where the density (or its derivative) has kinks."""
        return ()

    @property
    def floor(self) -> float:
        """Verified lower bound for the density over [0, 1]."""
        raise NotImplementedError

    def bounds(self) -> tuple[float, float]:
        """Outer enclosure (lo, hi) of the range over [0, 1].

        Guaranteed lo <= min rho and hi >= max rho; exact for closed-form
        kinds, conservative for composite ones.
        """
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @property
    def digest(self) -> str:
        return _digest(self.to_json())

    def __eq__(self, other):
        return isinstance(other, Density) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.digest)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


@dataclass(frozen=True, eq=False)
class ConstantDensity(Density):
    value: float

    kind = "constant"

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def differentiable(self):
        return True

    @property
    def floor(self):
        return self.value

    def bounds(self):
        return (self.value, self.value)

    def to_json(self):
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True, eq=False)
class LinearDensity(Density):
    slope: float
    intercept: float

    kind = "linear"

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    def derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.slope)

    @property
    def differentiable(self):
        return True

    @property
    def floor(self):
        return min(self.intercept, self.intercept + self.slope)

    def bounds(self):
        ends = (self.intercept, self.intercept + self.slope)
        return (min(ends), max(ends))

    def to_json(self):
        return {"kind": "linear", "slope": self.slope, "intercept": self.intercept}


@dataclass(frozen=True, eq=False)
class QuadraticDensity(Density):
    """a*x^2 + b*x + c.  Not one of the classic families, but strictly
    concave smooth test densities are needed and a*x^2 + b*x + c is the
    simplest source of them."""

    a: float
    b: float
    c: float

    kind = "quadratic"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (self.a * x + self.b) * x + self.c

    def derivative(self, x):
        return 2.0 * self.a * np.asarray(x, dtype=float) + self.b

    @property
    def differentiable(self):
        return True

    def _extrema(self):
        vals = [self.c, self.a + self.b + self.c]
        if self.a != 0.0:
            xv = -self.b / (2.0 * self.a)
            if 0.0 < xv < 1.0:
                vals.append((self.a * xv + self.b) * xv + self.c)
        return min(vals), max(vals)

    @property
    def floor(self):
        return self._extrema()[0]

    def bounds(self):
        return self._extrema()

    def to_json(self):
        return {"kind": "quadratic", "a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True, eq=False)
class PiecewiseLinearDensity(Density):
    knots: tuple
    values: tuple

    kind = "piecewise_linear"

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.knots, self.values)

    def derivative(self, x):
        """A.e. derivative: the slope of the piece containing x.

        At a knot the right-hand slope is returned (left-hand at x = 1).
        """
        return self.derivative_sided(x, +1)

    def derivative_sided(self, x, side: int):
        x = np.asarray(x, dtype=float)
        kn = np.asarray(self.knots)
        sl = np.asarray(self.slopes())
        mode = "right" if side >= 0 else "left"
        idx = np.clip(np.searchsorted(kn, x, side=mode) - 1, 0, len(sl) - 1)
        return sl[idx]

    @property
    def differentiable(self):
        return True

    def slopes(self) -> tuple:
        kn = np.asarray(self.knots)
        va = np.asarray(self.values)
        return tuple(np.diff(va) / np.diff(kn))

    @property
    def breakpoints(self):
        return tuple(k for k in self.knots if 0.0 < k < 1.0)

    @property
    def floor(self):
        return min(self.values)

    def bounds(self):
        return (min(self.values), max(self.values))

    def to_json(self):
        return {
            "kind": "piecewise_linear",
            "knots": list(self.knots),
            "values": list(self.values),
        }


@dataclass(frozen=True, eq=False)
class ProductDensity(Density):
    """Pointwise product of two densities (e.g. p*rho of a reduced
    Sturm-Liouville problem)."""

    left: Density
    right: Density

    kind = "product"

    def __call__(self, x):
        return self.left(x) * self.right(x)

    def derivative(self, x):
        return self.left.derivative(x) * self.right(x) + self.left(x) * self.right.derivative(x)

    def derivative_sided(self, x, side):
        return (self.left.derivative_sided(x, side) * self.right(x)
                + self.left(x) * self.right.derivative_sided(x, side))

    @property
    def differentiable(self):
        return self.left.differentiable and self.right.differentiable

    @property
    def breakpoints(self):
        return tuple(sorted(set(self.left.breakpoints) | set(self.right.breakpoints)))

    @property
    def floor(self):
        return self.left.floor * self.right.floor

    def bounds(self):
        l_lo, l_hi = self.left.bounds()
        r_lo, r_hi = self.right.bounds()
        return (l_lo * r_lo, l_hi * r_hi)

    def to_json(self):
        return {"kind": "product", "factors": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True, eq=False)
class BlendDensity(Density):
    """Affine combination w*end + (1-w)*start, evaluated pointwise.

    Used for homotopy sweeps between densities whose blend has no closed
    form in the basic kinds (e.g. quadratic against piecewise-linear).
    """

    start: Density
    end: Density
    weight: float

    kind = "blend"

    def __call__(self, x):
        return self.weight * self.end(x) + (1.0 - self.weight) * self.start(x)

    def derivative(self, x):
        return self.weight * self.end.derivative(x) + (1.0 - self.weight) * self.start.derivative(x)

    def derivative_sided(self, x, side):
        return (self.weight * self.end.derivative_sided(x, side)
                + (1.0 - self.weight) * self.start.derivative_sided(x, side))

    @property
    def differentiable(self):
        return self.start.differentiable and self.end.differentiable

    @property
    def breakpoints(self):
        return tuple(sorted(set(self.start.breakpoints) | set(self.end.breakpoints)))

    @property
    def floor(self):
        w = self.weight
        if 0.0 <= w <= 1.0:
            return w * self.end.floor + (1.0 - w) * self.start.floor
        # outside [0,1] one coefficient is negative: pair floor with the
        # opposite extreme to keep a valid lower bound
        s_lo, s_hi = self.start.bounds()
        e_lo, e_hi = self.end.bounds()
        cands = [w * e + (1.0 - w) * s for e in (e_lo, e_hi) for s in (s_lo, s_hi)]
        return min(cands)

    def bounds(self):
        s_lo, s_hi = self.start.bounds()
        e_lo, e_hi = self.end.bounds()
        w = self.weight
        cands = [w * e + (1.0 - w) * s for e in (e_lo, e_hi) for s in (s_lo, s_hi)]
        return (min(cands), max(cands))

    def to_json(self):
        return {
            "kind": "blend",
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "weight": self.weight,
        }


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_constant(c: float) -> ConstantDensity:
    """Constant density rho = c.  Requires c > 0."""
    if not (c > 0.0) or not math.isfinite(c):
        raise DensityError(f"constant density needs c > 0, got {c}")
    if c < MIN_FLOOR:
        raise DensityError(f"density floor {c} below minimum {MIN_FLOOR}")
    return ConstantDensity(float(c))


def make_linear(slope: float, intercept: float) -> LinearDensity:
    """Linear density rho(x) = slope*x + intercept, positive on [0, 1]."""
    if not math.isfinite(slope) or not math.isfinite(intercept):
        raise DensityError("linear density needs finite coefficients")
    lo = min(intercept, intercept + slope)
    if lo <= 0.0:
        raise DensityError(
            f"linear density slope={slope} intercept={intercept} "
            f"is nonpositive on [0,1] (min {lo})")
    if lo < MIN_FLOOR:
        raise DensityError(f"density floor {lo} below minimum {MIN_FLOOR}")
    return LinearDensity(float(slope), float(intercept))


def make_quadratic(a: float, b: float, c: float) -> QuadraticDensity:
    """Quadratic density rho(x) = a*x^2 + b*x + c, positive on [0, 1]."""
    d = QuadraticDensity(float(a), float(b), float(c))
    lo = d.floor
    if lo <= 0.0:
        raise DensityError(f"quadratic density ({a},{b},{c}) has min {lo} <= 0 on [0,1]")
    if lo < MIN_FLOOR:
        raise DensityError(f"density floor {lo} below minimum {MIN_FLOOR}")
    return d


def make_piecewise_linear(knots: Sequence[float], values: Sequence[float]) -> PiecewiseLinearDensity:
    """Continuous piecewise-linear interpolant through (knots[i], values[i]).

    Knots must be a strictly increasing partition of [0, 1] starting at 0
    and ending at 1; values must be positive and match knots in length.
    """
    kn = [float(k) for k in knots]
    va = [float(v) for v in values]
    if len(kn) != len(va):
        raise DensityError(f"got {len(kn)} knots but {len(va)} values")
    if len(kn) < 2:
        raise DensityError("need at least the two endpoint knots")
    if kn[0] != 0.0 or kn[-1] != 1.0:
        raise DensityError(f"knots must run from 0 to 1, got [{kn[0]}, {kn[-1]}]")
    if any(b <= a for a, b in zip(kn, kn[1:])):
        raise DensityError("knots must be strictly increasing")
    lo = min(va)
    if lo <= 0.0:
        raise DensityError(f"piecewise values must be positive, min {lo}")
    if lo < MIN_FLOOR:
        raise DensityError(f"density floor {lo} below minimum {MIN_FLOOR}")
    return PiecewiseLinearDensity(tuple(kn), tuple(va))


def make_product(left: Density, right: Density) -> ProductDensity:
    d = ProductDensity(left, right)
    if d.floor < MIN_FLOOR:
        raise DensityError(f"product density floor {d.floor} below minimum {MIN_FLOOR}")
    return d


def from_json(obj: dict) -> Density:
    """Build a density from its JSON description.

    Schema: {"kind":"constant","value":v} | {"kind":"linear","slope":s,
    "intercept":b} | {"kind":"quadratic","a":..,"b":..,"c":..} |
    {"kind":"piecewise_linear","knots":[...],"values":[...]} |
    {"kind":"product","factors":[<density>,<density>]}
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DensityError(f"density JSON must be an object with a 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "constant":
            return make_constant(obj["value"])
        if kind == "linear":
            return make_linear(obj["slope"], obj["intercept"])
        if kind == "quadratic":
            return make_quadratic(obj["a"], obj["b"], obj["c"])
        if kind == "piecewise_linear":
            return make_piecewise_linear(obj["knots"], obj["values"])
        if kind == "product":
            factors = obj["factors"]
            if len(factors) != 2:
                raise DensityError("product density needs exactly two factors")
            return make_product(from_json(factors[0]), from_json(factors[1]))
    except KeyError as exc:
        raise DensityError(f"density JSON for kind {kind!r} missing field {exc}") from exc
    raise DensityError(f"unknown density kind {kind!r}")


def reflected(d: Density) -> Density:
    """The density x -> d(1 - x) as a first-class density."""
    if isinstance(d, ConstantDensity):
        return d
    if isinstance(d, LinearDensity):
        return LinearDensity(-d.slope, d.intercept + d.slope)
    if isinstance(d, QuadraticDensity):
        return QuadraticDensity(d.a, -2.0 * d.a - d.b, d.a + d.b + d.c)
    if isinstance(d, PiecewiseLinearDensity):
        kn = tuple(1.0 - k for k in reversed(d.knots))
        return PiecewiseLinearDensity(kn, tuple(reversed(d.values)))
    if isinstance(d, ProductDensity):
        return ProductDensity(reflected(d.left), reflected(d.right))
    if isinstance(d, BlendDensity):
        return BlendDensity(reflected(d.start), reflected(d.end), d.weight)
    raise DensityError(f"cannot reflect density kind {d.kind!r}")


# ---------------------------------------------------------------------------
# concavity and interpolation
# ---------------------------------------------------------------------------

def is_concave(d: Density, tol: float = CONCAVITY_TOL) -> bool:
    """Whether the density is concave on [0, 1].

    Piecewise-linear kinds use the exact slope-monotonicity criterion
    (slopes non-increasing, no tolerance).  Smooth and composite kinds use
    a dense midpoint test: rho((a+b)/2) >= (rho(a)+rho(b))/2 - tol over
    all pairs of a 257-point grid.
    """
    if isinstance(d, ConstantDensity) or isinstance(d, LinearDensity):
        return True
    if isinstance(d, QuadraticDensity):
        return d.a <= tol
    if isinstance(d, PiecewiseLinearDensity):
        sl = d.slopes()
        return all(b <= a for a, b in zip(sl, sl[1:]))
    if isinstance(d, BlendDensity) and 0.0 <= d.weight <= 1.0:
        # affine blends with nonnegative weights preserve concavity
        if is_concave(d.start, tol) and is_concave(d.end, tol):
            return True
    return _midpoint_concave(d, tol)


def _midpoint_concave(d: Density, tol: float, grid: int = 257) -> bool:
    xs = np.linspace(0.0, 1.0, grid)
    fx = d(xs)
    a, b = np.meshgrid(xs, xs, indexing="ij")
    mids = d(0.5 * (a + b).ravel()).reshape(grid, grid)
    return bool(np.all(mids >= 0.5 * (fx[:, None] + fx[None, :]) - tol))


def hat_interpolant(d: Density, nodes: Sequence[float]) -> PiecewiseLinearDensity:
    """Piecewise-linear chord interpolant of ``d`` through ``nodes``.

    Nodes must include 0 and 1 and lie in [0, 1].  For concave ``d`` the
    result is pointwise <= d (chords run under a concave graph) and equals
    d at the nodes.
    """
    pts = sorted(set(float(v) for v in nodes) | {0.0, 1.0})
    if pts[0] < 0.0 or pts[-1] > 1.0:
        raise DensityError(f"interpolation nodes must lie in [0,1]: {pts[0]}..{pts[-1]}")
    vals = d(np.asarray(pts))
    return make_piecewise_linear(pts, list(vals))


def density_max(d: Density, grid: int = 8193) -> float:
    """Accurate maximum of the density over [0, 1].

    Exact for closed-form kinds; composite kinds use a dense grid with one
    parabolic refinement around the arg-max.
    """
    if isinstance(d, (ConstantDensity, LinearDensity, QuadraticDensity,
                      PiecewiseLinearDensity)):
        return d.bounds()[1]
    xs = np.linspace(0.0, 1.0, grid)
    fx = d(xs)
    i = int(np.argmax(fx))
    best = float(fx[i])
    if 0 < i < grid - 1:
        # vertex of the parabola through the three bracketing samples
        h = xs[1] - xs[0]
        denom = fx[i - 1] - 2.0 * fx[i] + fx[i + 1]
        if denom < 0.0:
            dx = 0.5 * h * (fx[i - 1] - fx[i + 1]) / denom
            best = max(best, float(d(np.array([xs[i] + dx]))[0]))
    return best


# ---------------------------------------------------------------------------
# homotopy families
# ---------------------------------------------------------------------------

def affine_combine(start: Density, end: Density, weight: float) -> Density:
    """weight*end + (1-weight)*start, merged into a closed-form kind when
    both operands allow it."""
    w = float(weight)
    piecewise_kinds = (ConstantDensity, LinearDensity, PiecewiseLinearDensity)
    if isinstance(start, piecewise_kinds) and isinstance(end, piecewise_kinds):
        kn = sorted({0.0, 1.0}
                    | set(getattr(start, "knots", ()))
                    | set(getattr(end, "knots", ())))
        xs = np.asarray(kn)
        vals = w * end(xs) + (1.0 - w) * start(xs)
        if min(vals) <= 0.0:
            raise DensityError(f"blend at weight {w} is nonpositive (min {min(vals)})")
        return make_piecewise_linear(kn, list(vals))
    quad_kinds = (ConstantDensity, LinearDensity, QuadraticDensity)
    if isinstance(start, quad_kinds) and isinstance(end, quad_kinds):
        def coeffs(d):
            if isinstance(d, ConstantDensity):
                return (0.0, 0.0, d.value)
            if isinstance(d, LinearDensity):
                return (0.0, d.slope, d.intercept)
            return (d.a, d.b, d.c)
        a0, b0, c0 = coeffs(start)
        a1, b1, c1 = coeffs(end)
        return make_quadratic(w * a1 + (1 - w) * a0, w * b1 + (1 - w) * b0,
                              w * c1 + (1 - w) * c0)
    d = BlendDensity(start, end, w)
    if d.floor <= 0.0:
        raise DensityError(f"blend at weight {w} has nonpositive floor {d.floor}")
    return d


@dataclass(frozen=True)
class HomotopyFamily:
    """One-parameter density family with an explicit tau-derivative.

    Two rules are supported:

    * ``affine``: tau -> tau*end + (1-tau)*start, with d(rho)/d(tau) =
      end - start.  Nominal domain [0, 1]; evaluation is allowed in a
      small margin beyond it (for central differences at the endpoints)
      whenever the extrapolated density stays positive.
    * ``linear_slope``: tau -> tau*x + intercept, with d(rho)/d(tau) = x.
      Domain tau > -intercept.
    """

    rule: str
    start: Density | None = None
    end: Density | None = None
    intercept: float = 1.0

    EXTENSION = 0.05  # how far past [0,1] an affine blend may be evaluated

    def __post_init__(self):
        if self.rule == "affine":
            if self.start is None or self.end is None:
                raise DensityError("affine family needs start and end densities")
        elif self.rule == "linear_slope":
            if not (self.intercept > 0.0):
                raise DensityError("linear family needs a positive intercept")
        else:
            raise DensityError(f"unknown homotopy rule {self.rule!r}")

    def tau_domain(self) -> tuple[float, float]:
        if self.rule == "affine":
            return (0.0, 1.0)
        return (-self.intercept, math.inf)

    def density_at(self, tau: float) -> Density:
        if self.rule == "affine":
            if not (-self.EXTENSION <= tau <= 1.0 + self.EXTENSION):
                raise DensityError(f"affine family parameter {tau} outside [0,1] margin")
            return affine_combine(self.start, self.end, tau)
        if not (tau > -self.intercept):
            raise DensityError(f"linear family needs tau > {-self.intercept}, got {tau}")
        if tau == 0.0:
            return make_constant(self.intercept)
        return make_linear(tau, self.intercept)

    def drho_dtau(self, x, tau: float = 0.0):
        """Partial derivative of the density in tau (independent of tau
        for both rules)."""
        x = np.asarray(x, dtype=float)
        if self.rule == "affine":
            return self.end(x) - self.start(x)
        return x

    @property
    def digest(self) -> str:
        if self.rule == "affine":
            return _digest(["affine", self.start.to_json(), self.end.to_json()])
        return _digest(["linear_slope", self.intercept])


def blend(family: HomotopyFamily, tau: float) -> Density:
    """Density of the family at tau in [0, 1]."""
    if not (0.0 <= tau <= 1.0):
        raise DensityError(f"blend parameter must lie in [0,1], got {tau}")
    return family.density_at(tau)
