"""Verification harness: bounds, derivative formulas, boundary identity,
crossings, homotopy monotonicity, interlacing, corpus, and report rows.

Frozen values tagged "oracle" come from the finite-difference Richardson
reference (see test_oracle); closed forms are exact.
"""

import math

import numpy as np
import pytest

from stringeig.density import (
    HomotopyFamily,
    make_constant,
    make_linear,
    make_piecewise_linear,
    make_quadratic,
)
from stringeig.oracle import fd_eigenvector_sign_changes
from stringeig.prufer import eigenvalue, spectrum
from stringeig.verify import (
    VerificationReport,
    check_gap_bound,
    check_identity,
    check_keller,
    check_ratio_bound,
    crossing_analysis,
    homotopy_monotonicity,
    huang_identity_residual,
    interlacing_check,
    keller_derivative,
    linear_family_monotonicity,
    random_concave_corpus,
    random_sl_pairs,
    ratio_derivative,
    reference_corpus,
    relative_variation,
    report_csv_row,
    run_claims,
    sort_reports,
    _huang_parts,
)

PI2 = math.pi ** 2

# oracle margins (fd Richardson eigenvalues, meshes 1000/2000)
BUMP_RATIO21_MARGIN = 0.34166033214675995     # rho = 1+4x(1-x)
WELL_RATIO21_MARGIN = -0.4894666044184741     # rho = 1+4(x-1/2)^2
GAP31_1PX_MARGIN = 13.647360703858432         # rho = 1+x, pair (3,1)
KELLER_TAU1_N2 = -8.633753972441104           # family tau*x+1 at tau=1


class TestRatioBound:
    def test_constant_density_equalities(self):
        rows = check_ratio_bound(make_constant(1.0), 4)
        assert len(rows) == 6
        for r in rows:
            assert abs(r.margin) <= 1e-8
            assert r.passed and r.in_hypothesis

    def test_bump_margin_oracle(self):
        rows = check_ratio_bound(make_quadratic(-4.0, 4.0, 1.0), 2)
        assert rows[0].margin == pytest.approx(BUMP_RATIO21_MARGIN, abs=1e-7)
        assert rows[0].margin > 0.0

    def test_convex_well_out_of_hypothesis(self):
        rows = check_ratio_bound(make_quadratic(4.0, -4.0, 2.0), 2)
        r = rows[0]
        assert not r.in_hypothesis
        assert r.margin == pytest.approx(WELL_RATIO21_MARGIN, abs=1e-7)
        assert r.margin < 0.0 and not r.passed


class TestGapBound:
    def test_constant_equality(self):
        rows = check_gap_bound(make_constant(1.0), 2)
        assert rows[0].margin == pytest.approx(0.0, abs=1e-8)

    def test_constant_two_scaling(self):
        rows = check_gap_bound(make_constant(2.0), 2)
        # gap = 3 pi^2 / 2 and bound = 3 pi^2 / 2
        assert rows[0].margin == pytest.approx(0.0, abs=1e-8)

    def test_linear_pair31_oracle(self):
        rows = check_gap_bound(make_linear(1.0, 1.0), 3)
        row31 = [r for r in rows if (r.n, r.m) == (3, 1)][0]
        assert row31.margin == pytest.approx(GAP31_1PX_MARGIN, abs=1e-6)
        assert row31.passed


class TestKeller:
    def test_linear_family_closed_form_at_zero(self):
        # d(lam_n)/d(tau) at tau=0 equals -n^2 pi^2 / 2
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        for n in (1, 2, 3):
            formula, fd = keller_derivative(fam, 0.0, n)
            assert formula == pytest.approx(-n * n * PI2 / 2.0, rel=1e-6)
            assert fd == pytest.approx(-n * n * PI2 / 2.0, rel=1e-5)

    def test_stationary_family_zero_derivative(self):
        d = make_constant(1.5)
        fam = HomotopyFamily("affine", start=d, end=d)
        formula, fd = keller_derivative(fam, 0.5, 2)
        assert abs(formula) < 1e-10
        assert abs(fd) < 1e-5

    def test_linear_family_tau_one_frozen(self):
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        formula, fd = keller_derivative(fam, 1.0, 2)
        assert formula == pytest.approx(KELLER_TAU1_N2, rel=1e-7)
        assert abs(formula - fd) <= 1e-4 * abs(formula)

    def test_check_rows_pass(self):
        rows = check_keller(make_quadratic(-2.0, 2.0, 1.2), 3, taus=(0.5,))
        assert rows
        for r in rows:
            assert r.passed, (r.claim, r.n, r.m, r.margin)


class TestRatioDerivative:
    def test_zero_at_flat_tau(self):
        # x-weighted difference of squared unit-density modes integrates to 0
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        val = ratio_derivative(fam, 0.0, 2, 1)
        assert abs(val) < 1e-8

    def test_constant_affine_family_zero(self):
        d = make_constant(2.0)
        fam = HomotopyFamily("affine", start=d, end=d)
        assert ratio_derivative(fam, 0.3, 2, 1) == pytest.approx(0.0, abs=1e-12)

    def test_matches_central_difference(self):
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        from stringeig.verify import _ratio_derivative_fd
        for tau in (0.0, 1.0):
            val = ratio_derivative(fam, tau, 2, 1)
            fd = _ratio_derivative_fd(fam, tau, 2, 1)
            ratio_scale = (eigenvalue(fam.density_at(tau), 2)
                           / eigenvalue(fam.density_at(tau), 1))
            assert abs(val - fd) <= 1e-4 * max(abs(val), abs(fd), 1e-3 * ratio_scale)

    def test_index_validation(self):
        fam = HomotopyFamily("linear_slope", intercept=1.0)
        with pytest.raises(ValueError):
            ratio_derivative(fam, 0.5, 1, 2)


class TestBoundaryIdentity:
    def test_unit_density_g_x_closed_form(self):
        d = make_constant(1.0)
        for n in (1, 2, 3):
            lhs, rhs, _ = _huang_parts(d, n, (0.0, 1.0), 2049)
            assert lhs == pytest.approx(2.0 * n * n * PI2, rel=1e-9)
            assert rhs == pytest.approx(2.0 * n * n * PI2, rel=1e-8)

    def test_unit_density_g_const_symmetry(self):
        d = make_constant(1.0)
        lhs, rhs, _ = _huang_parts(d, 2, (1.0,), 2049)
        assert lhs == pytest.approx(0.0, abs=1e-8)
        assert rhs == pytest.approx(0.0, abs=1e-8)

    def test_linear_density_g_x2(self):
        d = make_linear(1.0, 1.0)
        lhs, rhs, delta = _huang_parts(d, 1, (0.0, 0.0, 1.0), 2049)
        assert abs(lhs - rhs) <= max(1e-6 * max(abs(lhs), 1.0), 2.0 * delta)
        assert delta < 1e-7

    def test_residual_api(self):
        res = huang_identity_residual(make_quadratic(-4.0, 4.0, 1.0), 2, (0.0, 1.0))
        assert res <= 1e-6 * 2.0 * 5 * 5 * PI2

    def test_piecewise_density_per_piece_slope(self):
        d = make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 2.0, 1.0])
        rows = check_identity(d, 2)
        for r in rows:
            assert r.passed, (r.n, r.m, r.margin, r.tolerance)

    def test_rejects_high_degree(self):
        with pytest.raises(ValueError):
            huang_identity_residual(make_constant(1.0), 1, (0, 0, 0, 0, 0, 1.0))


class TestCrossings:
    def test_unit_density_mode2_closed_form(self):
        an = crossing_analysis(make_constant(1.0), 2)
        assert len(an.crossings) == 2
        assert an.crossings[0] == pytest.approx(1.0 / 3.0, abs=1e-8)
        assert an.crossings[1] == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert an.total == pytest.approx(0.0, abs=1e-8)
        assert an.pattern_ok and an.ordering_ok

    def test_unit_density_mode3_total_zero(self):
        an = crossing_analysis(make_constant(1.0), 3)
        assert len(an.per_interval) == 2
        assert len(an.crossings) == 4
        assert an.total == pytest.approx(0.0, abs=1e-8)

    def test_linear_density_total_nonnegative(self):
        an = crossing_analysis(make_linear(1.0, 1.0), 2)
        assert an.total >= -1e-8
        assert an.quad_error < 1e-8
        assert an.pattern_ok and an.ordering_ok

    def test_crossings_straddle_upper_mode_zero(self):
        an = crossing_analysis(make_quadratic(-4.0, 4.0, 1.0), 2)
        e = spectrum(make_quadratic(-4.0, 4.0, 1.0), 2).pairs[1]
        x1, x2 = an.crossings
        assert x1 < e.zeros[0] < x2

    def test_rejects_first_mode(self):
        with pytest.raises(ValueError):
            crossing_analysis(make_constant(1.0), 1)


class TestHomotopy:
    def test_constant_density_flat_ratio(self):
        rep = homotopy_monotonicity(make_constant(1.0), 2, steps=7)
        assert rep.passed
        assert abs(rep.margin) < 1e-9

    def test_bump_sweep_and_endpoint_ratio(self):
        rep = homotopy_monotonicity(make_quadratic(-4.0, 4.0, 1.0), 2, steps=11)
        assert rep.passed
        d = make_quadratic(-4.0, 4.0, 1.0)
        assert eigenvalue(d, 2) / eigenvalue(d, 1) >= 4.0

    def test_linear_family_strictly_increasing(self):
        for n in (2, 3):
            rep = linear_family_monotonicity(1.0, n)
            assert rep.passed
            assert rep.margin > 0.0
            assert rep.tolerance < 0.0  # strictness encoded as negative tolerance


class TestInterlacing:
    def test_unit_density(self):
        rep = interlacing_check(spectrum(make_constant(1.0), 3))
        assert rep.passed
        s = spectrum(make_constant(1.0), 3)
        assert s.pairs[1].zeros[0] == pytest.approx(0.5, abs=1e-10)
        z3 = s.pairs[2].zeros
        assert z3[0] < 0.5 < z3[1]

    def test_single_mode_vacuous(self):
        rep = interlacing_check(spectrum(make_quadratic(-1.0, 1.0, 1.0), 1))
        assert rep.passed

    def test_linear_density_zeros_match_oracle(self):
        d = make_linear(1.0, 1.0)
        s = spectrum(d, 4)
        rep = interlacing_check(s)
        assert rep.passed
        for n in (2, 3, 4):
            mesh_zeros = fd_eigenvector_sign_changes(d, n, 2000)
            np.testing.assert_allclose(s.pairs[n - 1].zeros, mesh_zeros, atol=1.5e-3)


class TestCorpus:
    def test_reference_corpus_size_and_kinds(self):
        corpus = reference_corpus()
        assert len(corpus) >= 20
        kinds = {d.kind for _, d in corpus}
        assert kinds == {"constant", "linear", "quadratic", "piecewise_linear"}

    def test_random_corpus_reproducible(self):
        a = random_concave_corpus(25, seed=42)
        b = random_concave_corpus(25, seed=42)
        assert [d.digest for d in a] == [d.digest for d in b]
        c = random_concave_corpus(25, seed=7)
        assert [d.digest for d in a] != [d.digest for d in c]

    def test_random_corpus_concave_positive(self):
        from stringeig.density import is_concave
        xs = np.linspace(0.0, 1.0, 501)
        for d in random_concave_corpus(60, seed=11):
            assert is_concave(d)
            assert np.all(d(xs) > 0.0)

    def test_sl_pairs_reproducible(self):
        a = random_sl_pairs(8, seed=42)
        b = random_sl_pairs(8, seed=42)
        assert [(p.digest, r.digest) for p, r in a] == [(p.digest, r.digest) for p, r in b]

    def test_relative_variation(self):
        assert relative_variation(make_constant(2.0)) == 0.0
        assert relative_variation(make_linear(1.0, 1.0)) == pytest.approx(1.0)


def test_kinked_concave_ratio_counterexample():
    """The ratio lower bound genuinely fails for concave densities with
    kinks: the symmetric tent (1, 2, 1) has lam_3/lam_2 below (3/2)^2 by
    5.2e-3, and the shooting solver, the finite-difference Richardson
    oracle, and adaptive high-order direct integration all agree on the
    eigenvalues to twelve digits.  This test pins the facts so the failing
    ratio rows on kinked densities are recognized as findings, not bugs.
    Smooth concave kinds show no violation anywhere in the random corpus.
    """
    tent = make_piecewise_linear([0.0, 0.5, 1.0], [1.0, 2.0, 1.0])
    from stringeig.density import is_concave
    from stringeig.oracle import fd_reference
    assert is_concave(tent)

    lam2 = eigenvalue(tent, 2)
    lam3 = eigenvalue(tent, 3)
    ref = fd_reference(tent, 3)
    assert lam2 == pytest.approx(ref[1], rel=1e-7)
    assert lam3 == pytest.approx(ref[2], rel=1e-7)

    margin = lam3 / lam2 - 2.25
    assert margin == pytest.approx(-0.0052368885726, abs=1e-9)
    # the violation dwarfs the combined numerical uncertainty
    assert margin < -1e-3

    rows = check_ratio_bound(tent, 3)
    row32 = [r for r in rows if (r.n, r.m) == (3, 2)][0]
    assert row32.in_hypothesis and not row32.passed


class TestReports:
    def test_pass_iff_margin_above_negative_tolerance(self):
        rows = check_ratio_bound(make_quadratic(4.0, -4.0, 2.0), 3)
        for r in rows:
            assert r.passed == (r.margin >= -r.tolerance)

    def test_sorting_stable(self):
        rows = check_ratio_bound(make_constant(1.0), 3)
        twice = sort_reports(sort_reports(rows))
        assert [(-1 if r.n is None else r.n, -1 if r.m is None else r.m)
                for r in twice] == [(2, 1), (3, 1), (3, 2)]

    def test_csv_row_shape(self):
        row = check_ratio_bound(make_constant(1.0), 2)[0]
        text = report_csv_row(row)
        assert text.count(",") == 8
        assert text.startswith("ratio,")

    def test_run_claims_rejects_unknown(self):
        with pytest.raises(ValueError):
            run_claims(make_constant(1.0), ["bogus"], 2)

    def test_report_is_frozen(self):
        row = check_ratio_bound(make_constant(1.0), 2)[0]
        assert isinstance(row, VerificationReport)
        with pytest.raises(AttributeError):
            row.margin = 0.0
