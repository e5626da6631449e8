"""Quadrature, normalization, matrix elements, and the Wigner kernel."""
import math

import mpmath as mp
import pytest

from susyosc import hilbert, susy


@pytest.fixture(scope="module")
def rule():
    return hilbert.default_rule()


@pytest.fixture(scope="module")
def prec():
    return hilbert.precision_bits()


class TestQuadrature:
    def test_gaussian_invariant(self, rule, prec):
        with mp.workprec(prec):
            got = hilbert.integrate_halfline(lambda x: mp.exp(-x * x), rule)
            exact = mp.sqrt(mp.pi) / 2
            assert abs(got - exact) / exact < 1e-14

    def test_first_excited_norm(self, rule, prec):
        # 2x e^{-x^2/2} has half-line norm integral sqrt(pi)
        with mp.workprec(prec):
            got = hilbert.integrate_halfline(
                lambda x: 4 * x * x * mp.exp(-x * x), rule, check=True)
            assert abs(got - mp.sqrt(mp.pi)) < 1e-14

    def test_rule_shape(self, rule):
        assert rule.x_max == 15.0
        assert len(rule.panels) == 15
        assert rule.node_count() == 15 * 64

    def test_refined_rule_doubles_panels(self, rule):
        assert len(rule.refined().panels) == 30

    def test_convergence_check_flags_rough_integrand(self, rule, prec):
        # |sin(40 x)|/(1+x) is not resolved consistently by the two levels
        with mp.workprec(prec):
            with pytest.raises(hilbert.QuadratureError):
                hilbert.integrate_halfline(
                    lambda x: abs(mp.sin(40 * x)) / (1 + x), rule, check=True)


class TestNormalization:
    def test_ground_tower_norm_constant(self, prec):
        # frozen at doubled precision before the main build; the independent
        # oracle differs by exactly 32^2 from an alternative state scaling
        with mp.workprec(prec):
            st = hilbert.normalize(5)
            assert abs(st.norm_constant ** 2 - 421135.0349751506) < 1e-6
            assert st.k_index == 0
            assert st.energy == 11

    def test_unit_norm(self, rule, prec):
        with mp.workprec(prec):
            for nu in (5, 11, 41):
                st = hilbert.normalize(nu, rule)
                n = hilbert.integrate_halfline(lambda x: st(x) ** 2, rule)
                assert abs(n - 1) < 1e-30

    def test_vanishes_at_origin(self):
        st = hilbert.normalize(17)
        assert st.base.wavefunction.rat.num[0] == 0

    def test_k_index_only_on_tower(self):
        assert hilbert.normalize(11).k_index == 1
        assert hilbert.normalize(3).k_index is None

    def test_rejects_unphysical(self):
        with pytest.raises(ValueError, match="not in the truncated"):
            hilbert.normalize(4)

    def test_orthonormality(self):
        assert hilbert.orthonormality_residual(7) < 1e-10

    def test_energy_consistency(self):
        for k in (0, 2, 6):
            assert hilbert.energy_residual(k) < 1e-8


class TestLadderCoefficients:
    def test_radicand_exact_integers(self):
        assert hilbert.ladder_radicand(1) == 153538560
        # radicand collapses to 2^6 (11+6i)(6i)(6i+1)(6i+8)(6i+9)(6i+10)
        for i in range(1, 9):
            rad = hilbert.ladder_radicand(i)
            assert rad.denominator == 1
            assert rad == (64 * (11 + 6 * i) * (6 * i) * (6 * i + 1)
                           * (6 * i + 8) * (6 * i + 9) * (6 * i + 10))

    def test_paper_magnitudes(self):
        d2 = hilbert.ladder_radicand(1) * hilbert.ladder_radicand(2)
        d3 = d2 * hilbert.ladder_radicand(3)
        assert abs(float(d2) - 3.3e17) / 3.3e17 < 0.05
        assert abs(float(d3) - 4.1e27) / 4.1e27 < 0.05

    def test_closed_value(self, prec):
        with mp.workprec(prec):
            a11 = hilbert.ladder_coefficient_closed(1)
            assert abs(a11 - 12391.067750601640545) < 1e-9

    def test_quadrature_matches_closed(self, prec):
        with mp.workprec(prec):
            for i in range(1, 6):
                closed = hilbert.ladder_coefficient_closed(i)
                quad = hilbert.ladder_coefficient_quadrature(i)
                assert abs(quad - closed) / closed < 1e-8

    def test_adjoint_direction_same_magnitude(self, prec):
        with mp.workprec(prec):
            fwd = hilbert.ladder_coefficient_quadrature(1)
            rev = hilbert.ladder_coefficient_quadrature(1, adjoint=True)
            assert abs(fwd - rev) / fwd < 1e-20

    def test_rejects_nonpositive_index(self):
        with pytest.raises(ValueError):
            hilbert.ladder_coefficient_closed(0)


@pytest.fixture(scope="module")
def tables():
    return hilbert.moment_tables(7)


class TestMomentTables:

    def test_shapes(self, tables):
        assert tables.K == 7
        for t in (tables.Mx, tables.Mx2, tables.Mp_imag, tables.Mp2):
            assert len(t) == 7 and all(len(row) == 7 for row in t)
        assert len(tables.a_coeffs) == 6

    def test_x_diagonals_positive(self, tables):
        assert all(tables.Mx[k][k] > 0 for k in range(7))

    def test_symmetries(self, tables):
        for k1 in range(7):
            for k2 in range(7):
                assert tables.Mx[k1][k2] == tables.Mx[k2][k1]
                assert tables.Mx2[k1][k2] == tables.Mx2[k2][k1]
                assert tables.Mp2[k1][k2] == tables.Mp2[k2][k1]

    def test_mp_hermiticity_measured(self, tables):
        # both triangles are integrated independently; anti-symmetry is an
        # integration-by-parts identity, not a construction artifact
        worst = max(abs(tables.Mp_imag[i][j] + tables.Mp_imag[j][i])
                    for i in range(7) for j in range(7))
        assert worst < 1e-10

    def test_mp_element_is_pure_imaginary(self, tables):
        el = tables.mp_element(0, 1)
        assert el.real == 0
        assert el.imag == tables.Mp_imag[0][1]

    def test_p2_diagonal_positive(self, tables):
        assert tables.Mp2[0][0] > 0

    def test_uncertainty_ground_floor(self, tables):
        for k in range(7):
            var_x = tables.Mx2[k][k] - tables.Mx[k][k] ** 2
            var_p = tables.Mp2[k][k]  # <p> = 0 on the diagonal
            assert mp.sqrt(var_x) * mp.sqrt(var_p) >= 0.5

    def test_json_roundtrip(self, tables):
        import json
        payload = json.loads(tables.to_json())
        assert payload["K"] == 7
        assert len(payload["Mx"]) == 7
        assert payload["a_coeffs"][0] == pytest.approx(12391.067750601640545)


class TestWignerKernel:
    def test_zero_for_nonpositive_x(self):
        assert hilbert.wigner_kernel(0, 0, -1, 0.5) == 0
        assert hilbert.wigner_kernel(0, 0, 0, 2.0) == 0

    def test_probe_value(self, prec):
        # frozen at doubled precision; see also the coherent-layer probes
        with mp.workprec(prec):
            w = hilbert.wigner_kernel(0, 0, 1.9, 0.8)
            assert abs(w.real - (-0.07121672229)) < 1e-9
            assert abs(w.imag) < 1e-30

    def test_conjugation_swaps_indices(self, prec):
        with mp.workprec(prec):
            a = hilbert.wigner_kernel(0, 1, 1.3, 2.1)
            b = hilbert.wigner_kernel(1, 0, 1.3, 2.1)
            assert abs(mp.conj(a) - b) < 1e-30

    def test_index_swap_with_negated_momentum(self, prec):
        with mp.workprec(prec):
            a = hilbert.wigner_kernel(0, 1, 1.3, 2.1)
            b = hilbert.wigner_kernel(1, 0, 1.3, -2.1)
            assert abs(a - b) < 1e-30

    def test_diagonal_real_and_even(self, prec):
        with mp.workprec(prec):
            d1 = hilbert.wigner_kernel(1, 1, 1.3, 2.1)
            d2 = hilbert.wigner_kernel(1, 1, 1.3, -2.1)
            assert abs(d1.imag) < 1e-30
            assert abs(mp.conj(d1) - d2) < 1e-30

    def test_oscillatory_momentum(self, prec):
        # panel count scales with |p| x; a high-p probe should still agree
        # with its own half-split refinement implicitly via symmetry
        with mp.workprec(prec):
            a = hilbert.wigner_kernel(0, 0, 3.0, 17.0)
            b = hilbert.wigner_kernel(0, 0, 3.0, -17.0)
            assert abs(a - b) < 1e-30


class TestHermiteExpansion:
    def test_matches_high_precision_values(self, prec):
        for nu in (5, 11, 41):
            exp = hilbert.hermite_expansion(nu)
            st = hilbert.normalize(nu)
            with mp.workprec(prec):
                for xf in (0.1, 0.7, 1.9, 3.3, 5.8, 8.4, 11.0):
                    ref = float(st(mp.mpf(xf)))
                    assert abs(exp(xf) - ref) < 5e-14

    def test_residual_degree_below_denominator(self):
        exp = hilbert.hermite_expansion(11)
        assert len(exp.residual) <= 8
        assert len(exp.denominator) == 9

    def test_coefficient_count(self):
        # quotient degree is nu + 4, so nu + 5 Hermite coefficients
        assert len(hilbert.hermite_expansion(5).coeffs) == 10

    def test_norm_from_coefficients(self):
        # the residual part is small; Hermite coefficients carry most of the
        # norm, and Parseval on the full line bounds them by 1
        exp = hilbert.hermite_expansion(5)
        s = sum(c * c for c in exp.coeffs)
        assert 0.9 < s < 2.1
