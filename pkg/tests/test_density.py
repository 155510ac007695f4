"""Density construction, concavity, chord interpolants, and blends."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringeig.density import (
    DensityError,
    HomotopyFamily,
    blend,
    density_max,
    from_json,
    hat_interpolant,
    is_concave,
    make_constant,
    make_linear,
    make_piecewise_linear,
    make_product,
    make_quadratic,
    reflected,
)

XS = np.linspace(0.0, 1.0, 10_001)


class TestConstructors:
    def test_constant_identity(self):
        d = make_constant(1.0)
        assert d(np.array([0.3]))[0] == 1.0
        assert d.floor == 1.0

    def test_constant_value(self):
        assert make_constant(4.0)(np.array([0.5]))[0] == 4.0

    def test_constant_rejects_zero(self):
        with pytest.raises(DensityError):
            make_constant(0.0)

    def test_constant_rejects_negative(self):
        with pytest.raises(DensityError):
            make_constant(-1.0)

    def test_linear_midpoint(self):
        assert make_linear(1.0, 1.0)(0.5) == pytest.approx(1.5, abs=0)

    def test_linear_degenerate_slope(self):
        d = make_linear(0.0, 2.0)
        assert np.all(d(XS) == 2.0)

    def test_linear_rejects_sign_change(self):
        # rho(1) = -1
        with pytest.raises(DensityError):
            make_linear(-2.0, 1.0)

    def test_piecewise_two_knots_equals_linear(self):
        pw = make_piecewise_linear([0.0, 1.0], [1.0, 2.0])
        ln = make_linear(1.0, 1.0)
        np.testing.assert_allclose(pw(XS), ln(XS), rtol=0, atol=1e-15)

    def test_piecewise_tent(self):
        d = make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 2.0, 1.0])
        assert d(0.25) == pytest.approx(1.5)
        assert is_concave(d)

    def test_piecewise_valley_not_concave(self):
        d = make_piecewise_linear([0.0, 0.5, 1.0], [2.0, 1.0, 2.0])
        assert d(0.75) == pytest.approx(1.5)
        assert not is_concave(d)

    def test_piecewise_rejects_mismatched_lengths(self):
        with pytest.raises(DensityError):
            make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 2.0])

    def test_piecewise_rejects_nonpositive_values(self):
        with pytest.raises(DensityError):
            make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 0.0, 1.0])

    def test_piecewise_rejects_unsorted_knots(self):
        with pytest.raises(DensityError):
            make_piecewise_linear([0.0, 0.7, 0.4, 1.0], [1.0, 1.0, 1.0, 1.0])

    def test_piecewise_rejects_bad_endpoints(self):
        with pytest.raises(DensityError):
            make_piecewise_linear([0.1, 1.0], [1.0, 1.0])

    def test_quadratic_floor_interior_vertex(self):
        d = make_quadratic(4.0, -4.0, 2.0)  # 1 + 4(x-1/2)^2
        assert d.floor == pytest.approx(1.0)
        assert density_max(d) == pytest.approx(2.0)

    def test_floor_guard(self):
        with pytest.raises(DensityError):
            make_constant(1e-9)


class TestConcavity:
    def test_concave_quadratic(self):
        assert is_concave(make_quadratic(-4.0, 4.0, 1.0), tol=1e-12)

    def test_convex_quadratic(self):
        assert not is_concave(make_quadratic(4.0, -4.0, 2.0), tol=1e-12)

    def test_linear_is_concave(self):
        assert is_concave(make_linear(1.0, 1.0))
        assert is_concave(make_linear(-0.5, 1.0))

    def test_product_checked_numerically(self):
        # (1+x)(2-x) = 2 + x - x^2: concave
        assert is_concave(make_product(make_linear(1.0, 1.0), make_linear(-1.0, 2.0)))
        # (1+x)(1+x): convex
        assert not is_concave(make_product(make_linear(1.0, 1.0), make_linear(1.0, 1.0)))


class TestHatInterpolant:
    def test_constant_fixed_point(self):
        d = make_constant(3.0)
        hat = hat_interpolant(d, [0.0, 0.2, 0.9, 1.0])
        np.testing.assert_allclose(hat(XS), 3.0)

    def test_bump_tent(self):
        d = make_quadratic(-4.0, 4.0, 1.0)
        hat = hat_interpolant(d, [0.0, 0.5, 1.0])
        assert hat(0.5) == pytest.approx(2.0)
        assert hat(0.25) == pytest.approx(1.5)
        assert d(0.25) == pytest.approx(1.75)

    def test_chords_under_concave_graph(self):
        d = make_quadratic(-4.0, 4.0, 1.0)
        hat = hat_interpolant(d, [0.0, 0.31, 0.5, 0.77, 1.0])
        assert np.all(hat(XS) <= d(XS) + 1e-14)
        for node in (0.0, 0.31, 0.5, 0.77, 1.0):
            assert hat(node) == pytest.approx(float(d(np.array([node]))[0]))

    def test_linear_exact(self):
        d = make_linear(1.0, 1.0)
        hat = hat_interpolant(d, [0.0, 1.0 / 3.0, 1.0])
        np.testing.assert_allclose(hat(XS), d(XS), atol=1e-14)

    def test_node_outside_interval(self):
        with pytest.raises(DensityError):
            hat_interpolant(make_constant(1.0), [0.0, 1.2, 1.0])


class TestBlend:
    def test_endpoints(self):
        fam = HomotopyFamily("affine", start=make_constant(1.0),
                             end=make_quadratic(-1.0, 1.0, 1.0))
        np.testing.assert_allclose(blend(fam, 0.0)(XS), fam.start(XS), atol=1e-15)
        np.testing.assert_allclose(blend(fam, 1.0)(XS), fam.end(XS), atol=1e-15)

    def test_constant_midpoint(self):
        fam = HomotopyFamily("affine", start=make_constant(1.0), end=make_constant(3.0))
        np.testing.assert_allclose(blend(fam, 0.5)(XS), 2.0)

    def test_rejects_outside_unit_interval(self):
        fam = HomotopyFamily("affine", start=make_constant(1.0), end=make_constant(3.0))
        with pytest.raises(DensityError):
            blend(fam, 1.5)

    def test_linear_slope_family(self):
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        d = fam.density_at(0.7)
        assert d(1.0) == pytest.approx(1.7)
        np.testing.assert_allclose(fam.drho_dtau(XS), XS)

    def test_blend_of_piecewise_stays_piecewise(self):
        tent = make_piecewise_linear([0.0, 0.4, 1.0], [1.0, 2.0, 1.2])
        fam = HomotopyFamily("affine", start=make_constant(1.0), end=tent)
        mixed = blend(fam, 0.5)
        assert mixed.kind == "piecewise_linear"
        np.testing.assert_allclose(mixed(XS), 0.5 * tent(XS) + 0.5, atol=1e-14)


concave_density = st.one_of(
    st.tuples(st.floats(-1.5, 2.0), st.floats(0.5, 2.0)).map(
        lambda t: make_linear(t[0], t[1] + max(0.0, -t[0]))),
    st.tuples(st.floats(0.1, 4.0), st.floats(0.1, 0.9), st.floats(1.0, 3.0)).map(
        lambda t: make_quadratic(-t[0], 2.0 * t[0] * t[1],
                                 t[2] + t[0] * max((1 - t[1]) ** 2, t[1] ** 2))),
)


@settings(max_examples=40, deadline=None)
@given(d=concave_density, tau=st.floats(0.0, 1.0))
def test_blend_preserves_concavity(d, tau):
    fam = HomotopyFamily("affine", start=make_constant(1.0), end=d)
    assert is_concave(blend(fam, tau))


@settings(max_examples=40, deadline=None)
@given(d=concave_density)
def test_positivity_floor(d):
    assert np.all(d(XS) >= d.floor - 1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-2.0, 2.0))
def test_piecewise_sided_derivative(knot, dslope):
    base = 1.0
    left_slope = 1.0
    right_slope = left_slope + dslope
    peak = base + left_slope * knot
    lift = max(0.0, 0.3 - min(base, peak, peak + right_slope * (1 - knot)))
    d = make_piecewise_linear(
        [0.0, knot, 1.0],
        [base + lift, peak + lift, peak + right_slope * (1 - knot) + lift])
    assert d.derivative_sided(knot, -1) == pytest.approx(left_slope)
    assert d.derivative_sided(knot, +1) == pytest.approx(right_slope)


class TestJson:
    def test_roundtrip_all_kinds(self):
        kinds = [
            make_constant(2.0),
            make_linear(1.0, 1.0),
            make_quadratic(-4.0, 4.0, 1.0),
            make_piecewise_linear([0.0, 0.4, 1.0], [1.0, 2.0, 1.5]),
            make_product(make_linear(1.0, 1.0), make_constant(2.0)),
        ]
        for d in kinds:
            clone = from_json(json.loads(json.dumps(d.to_json())))
            assert clone == d
            np.testing.assert_allclose(clone(XS), d(XS))

    def test_unknown_kind(self):
        with pytest.raises(DensityError):
            from_json({"kind": "exotic"})

    def test_missing_field(self):
        with pytest.raises(DensityError):
            from_json({"kind": "linear", "slope": 1.0})

    def test_invalid_parameters(self):
        with pytest.raises(DensityError):
            from_json({"kind": "constant", "value": -2.0})


def test_reflection():
    d = make_piecewise_linear([0.0, 0.3, 1.0], [1.0, 2.0, 1.5])
    r = reflected(d)
    np.testing.assert_allclose(r(XS), d(1.0 - XS), atol=1e-14)
    q = make_quadratic(-2.5, 1.5, 1.2)
    np.testing.assert_allclose(reflected(q)(XS), q(1.0 - XS), atol=1e-13)


def test_density_max_product():
    d = make_product(make_linear(1.0, 1.0), make_linear(-1.0, 2.0))
    # (1+x)(2-x) peaks at x=1/2 with value 2.25
    assert density_max(d) == pytest.approx(2.25, abs=1e-10)
