"""Coherent-state observables over the 5+6k tower."""
import cmath
import math

import mpmath as mp
import pytest

from susyosc import coherent, hilbert


@pytest.fixture(scope="module")
def state_1e5():
    return coherent.make_coherent(1e5)


@pytest.fixture(scope="module")
def float_rule_points():
    return [(float(x), float(w)) for x, w in hilbert.default_rule().points()]


class TestMakeCoherent:
    def test_vacuum(self):
        st = coherent.make_coherent(0)
        assert st.K == 1
        assert st.alpha_complex(0) == 1
        assert st.logF == 0
        assert st.mu == 5

    def test_adaptive_truncation_large_z(self, state_1e5):
        # weight peaks at k=2 and the tail criterion lands around K=16
        assert 12 <= state_1e5.K <= 24
        w = state_1e5.weights()
        assert max(range(state_1e5.K), key=lambda k: w[k]) == 2

    def test_coefficient_normalization(self, state_1e5):
        for z in (0.3, 17.0, 1e3):
            st = coherent.make_coherent(z)
            assert coherent.coefficient_norm_residual(st) < 1e-12
        assert coherent.coefficient_norm_residual(state_1e5) < 1e-12

    def test_eigenvector_property(self, state_1e5):
        assert coherent.eigen_residual(state_1e5) < 1e-10
        st = coherent.make_coherent(250 * cmath.exp(0.7j))
        assert coherent.eigen_residual(st) < 1e-10

    def test_phases_follow_arg_z(self):
        z = 40 * cmath.exp(1.1j)
        st = coherent.make_coherent(z)
        for k in range(st.K):
            assert abs(float(st.alpha[k][1]) - 1.1 * k) < 1e-12

    def test_explicit_K_too_small(self):
        with pytest.raises(coherent.TruncationError):
            coherent.make_coherent(1e5, K=3)

    def test_rejects_other_towers(self):
        with pytest.raises(ValueError, match="mu=5"):
            coherent.make_coherent(1.0, mu=7)

    def test_log_D_ladder(self, state_1e5):
        # D_1 = a_11, frozen radicand
        assert abs(mp.exp(2 * state_1e5.log_D[1]) - 153538560) < 1e-4


class TestEnergy:
    def test_base_value_exact(self):
        assert coherent.energy_expectation(0) == 11

    def test_frozen_profile_points(self):
        # oracles summed independently at doubled precision
        assert abs(coherent.energy_expectation(1e4) - 16.08915657313253) < 1e-9
        assert abs(coherent.energy_expectation(1e5) - 40.19793075485417) < 1e-9

    def test_nondecreasing_sample(self):
        zs = [0, 1, 100, 5e3, 2e4, 1e5]
        es = [coherent.energy_expectation(z) for z in zs]
        assert all(b >= a for a, b in zip(es, es[1:]))

    def test_tracks_weight_peak(self, state_1e5):
        w = state_1e5.weights()
        k_star = max(range(state_1e5.K), key=lambda k: w[k])
        e = coherent.energy_expectation(1e5)
        assert abs(e - (11 + 12 * k_star)) <= 12  # within one rung of the peak


class TestDensity:
    def test_vacuum_density_is_ground_tower_state(self):
        got = coherent.density(1.3, 0.7, 0)
        want = hilbert.hermite_expansion(5)(1.3) ** 2
        assert got == pytest.approx(want, abs=1e-15)

    def test_zero_left_of_origin(self):
        assert coherent.density(-2.0, 0.0, 10) == 0.0
        assert coherent.density(0.0, 0.0, 10) == 0.0

    def test_period_pi_over_six(self, state_1e5):
        a = coherent.density(2.1, 0.3, None, state=state_1e5)
        b = coherent.density(2.1, 0.3 + math.pi / 6, None, state=state_1e5)
        assert a == pytest.approx(b, rel=1e-12)

    def test_normalized_over_halfline(self, state_1e5, float_rule_points):
        for t in (0.0, 0.11):
            total = sum(w * coherent.density(x, t, None, state=state_1e5)
                        for x, w in float_rule_points)
            assert abs(total - 1) < 1e-8

    def test_nonnegative(self, state_1e5):
        for x in (0.4, 1.7, 3.2, 6.5):
            assert coherent.density(x, 0.2, None, state=state_1e5) >= 0


class TestDistinguishability:
    def test_unity_at_origin(self):
        assert coherent.distinguishability(0) == 1

    def test_frozen_large_z(self):
        assert abs(coherent.distinguishability(1e5) - 0.06584014600587472) < 1e-12

    def test_two_interior_sign_changes(self):
        # zeros near 12956.9 and 49545.0
        assert coherent.distinguishability(12000) > 0
        assert coherent.distinguishability(14000) < 0
        assert coherent.distinguishability(45000) < 0
        assert coherent.distinguishability(52000) > 0

    def test_bounded(self):
        for z in (10, 300, 7e3, 6e4):
            assert abs(coherent.distinguishability(z)) <= 1


class TestCatStates:
    def test_parity_supports_disjoint(self):
        plus = coherent.make_cat(1e5, +1)
        minus = coherent.make_cat(1e5, -1)
        for k in range(plus.plus_component.K):
            if k % 2 == 0:
                assert abs(minus.coefficient(k)) < 1e-12
            else:
                assert abs(plus.coefficient(k)) < 1e-12

    def test_exact_norm_reported(self):
        cat = coherent.make_cat(1e5, +1)
        d = coherent.distinguishability(1e5)
        assert abs(cat.exact_norm_squared - (1 + d)) < 1e-12

    def test_vacuum_plus_cat_density(self):
        got = coherent.cat_density(1.3, 0.2, 0, +1)
        # at z=0 the pair collapses to twice the same state over sqrt(2)^2
        want = 2 * hilbert.hermite_expansion(5)(1.3) ** 2
        assert got == pytest.approx(want, rel=1e-12)

    def test_cat_density_nonnegative(self):
        cat = coherent.make_cat(1e5, -1)
        for x in (0.6, 2.2, 4.4):
            assert coherent.cat_density(x, 0.1, None, -1, cat=cat) >= 0

    def test_parity_validated(self):
        with pytest.raises(ValueError, match="parity"):
            coherent.make_cat(1.0, 0)


class TestWigner:
    def test_zero_halfplane(self):
        assert coherent.wigner(-0.5, 1.0, 500) == 0
        assert coherent.wigner(0, 1.0, 500) == 0

    def test_probe_paper_truncation(self):
        w = coherent.wigner(1.9, 0.8, 500, K_w=1)
        assert abs(w - (-0.07110093816115241)) < 1e-9

    def test_probe_converged(self):
        w = coherent.wigner(1.9, 0.8, 500)
        assert abs(w - (-0.066643605946627)) < 1e-8

    def test_report_both_modes(self):
        rep = coherent.wigner_report(0.9, -0.4, 500)
        assert set(rep) == {"k00_only", "converged"}
        for v in rep.values():
            assert mp.isfinite(v)

    def test_normalization_constant(self):
        st = coherent.make_coherent(500)
        assert abs(mp.exp(st.logF) - 1.0016284473) < 1e-9


class TestBeamsplitter:
    def test_vacuum(self):
        pmf = coherent.beamsplitter_pmf(0, N_max=3)
        assert pmf.table[0][0] == 1
        assert pmf.total() == 1

    def test_total_probability(self):
        pmf = coherent.beamsplitter_pmf(1e5, N_max=24)
        assert abs(pmf.total() - 1) < 1e-10

    def test_entries_nonnegative(self):
        pmf = coherent.beamsplitter_pmf(1e5, N_max=10)
        assert all(v >= 0 for row in pmf.table for v in row)

    def test_conditional_binomial_exact(self):
        pmf = coherent.beamsplitter_pmf(1e5, N_max=12)
        for n in range(1, 7):
            cond = [pmf.table[n1][n - n1] for n1 in range(n + 1)]
            s = mp.fsum(cond)
            for n1, c in enumerate(cond):
                want = mp.binomial(n, n1) / mp.mpf(2) ** n
                assert abs(c / s - want) < 1e-12

    def test_marginal_total_matches_weights(self, state_1e5):
        pmf = coherent.beamsplitter_pmf(1e5, N_max=12)
        w = state_1e5.weights()
        for n in (0, 1, 2, 5):
            assert abs(pmf.marginal_total(n) - w[n]) < 1e-15

    def test_does_not_factorize(self):
        pmf = coherent.beamsplitter_pmf(1e5, N_max=4)
        gap = abs(pmf.table[1][1] * pmf.table[0][0]
                  - pmf.table[1][0] * pmf.table[0][1])
        assert gap > 1e-4


class TestLinearEntropy:
    def test_vacuum_product_state(self):
        assert abs(coherent.linear_entropy(0)) < 1e-10

    def test_frozen_large_z(self):
        s = coherent.linear_entropy(1e5)
        assert abs(s - 0.2051267963774588) < 1e-10

    def test_doubled_cutoffs_converged(self):
        s = coherent.linear_entropy(1e5)
        sd = coherent.linear_entropy(1e5, doubled=True)
        assert abs(s - sd) < 1e-8

    def test_range(self):
        for z in (5, 500, 3e4):
            s = coherent.linear_entropy(z)
            assert 0 <= s < 1

    def test_phase_invariance(self):
        a = coherent.linear_entropy(700)
        b = coherent.linear_entropy(700 * cmath.exp(0.9j))
        assert abs(a - b) < 1e-15


class TestUncertainties:
    def test_vacuum_anchors(self):
        sx, sp = coherent.uncertainties(0)
        assert abs(sx - 1.2666656383274837) < 1e-12
        assert abs(sp - 3.0808334747879763) < 1e-12

    def test_product_floor_sample(self):
        tables = hilbert.moment_tables(7)
        for z in (0, 13.0, 400.0, 2e4):
            sx, sp = coherent.uncertainties(z, tables=tables)
            assert sx * sp >= 0.5
            assert sx > 1 / math.sqrt(2)
            assert sp > 1 / math.sqrt(2)

    def test_complex_eigenvalue(self):
        sx, sp = coherent.uncertainties(90j)
        assert sx > 0 and sp > 0


class TestMandelQ:
    def test_defined_zero_at_origin(self):
        assert coherent.mandel_q(0) == 0

    def test_frozen_points(self):
        assert abs(coherent.mandel_q(1) - (-5.570425789e-9)) < 1e-15
        assert abs(coherent.mandel_q(1e5) - (-0.7401409857339477)) < 1e-12

    def test_negative_on_grid(self):
        for z in (1e-2, 1, 50, 1e3, 2e4, 1e5):
            assert coherent.mandel_q(z) < 0

    def test_small_z_scaling(self):
        # Q is quadratic in |z| near the origin
        q1, q2 = coherent.mandel_q(1e-2), coherent.mandel_q(1)
        assert abs(q1 / q2 - 1e-4) < 1e-10

    def test_two_level_leading_order(self):
        # the strict two-level estimate -|z|^2/D_1^2; the third level feeds
        # back at relative 2 D_1^2 / a_17^2, about 14 percent
        q = coherent.mandel_q(1e-2)
        two_level = -1e-4 / 153538560
        assert abs(q - two_level) / abs(two_level) < 0.15
