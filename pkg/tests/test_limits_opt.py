"""
Tests for gain optimization, average fidelity, source placement and distance limits.
"""
import math
from unittest.mock import patch

import numpy as np
import pytest

from src import limits_opt
from src.core import channel
from src.core.channel import ChannelParams
from src.core.teleport import FockInput, GaussianInput
from src.errors import DomainError, QuadratureError


class TestGainOptimization:
    """Tests for the displacement-gain scan."""

    def test_optimum_at_large_squeezing_is_star(self):
        """At zeta=20 the best gain is |T2/T1|."""
        lam, best = limits_opt.optimize_lambda(GaussianInput(0.88), ChannelParams(zeta_mag=20.0, T2=0.9))
        assert lam == pytest.approx(0.9, abs=1e-3)
        assert 0.0 < best <= 1.0

    @pytest.mark.parametrize("state", [GaussianInput(0.88), GaussianInput(0.5, 0.3), FockInput(1), FockInput(5)])
    @pytest.mark.parametrize("t1, t2", [(1.0, 0.9), (1.0, 0.5), (0.8, 0.9)])
    def test_narrow_peak_at_large_squeezing_is_found(self, state, t1, t2):
        """At zeta=20 the maximum is never below the value at |T2/T1|."""
        p = ChannelParams(zeta_mag=20.0, T1=t1, T2=t2)
        _, best = limits_opt.optimize_lambda(state, p)
        assert best >= limits_opt.fidelity_at(state, p, t2 / t1) - 1e-12

    def test_squeezed_vacuum_maximum_at_large_squeezing(self):
        p = ChannelParams(zeta_mag=20.0, T2=0.9)
        _, best = limits_opt.optimize_lambda(GaussianInput(0.88), p)
        assert best == pytest.approx(limits_opt.fidelity_at(GaussianInput(0.88), p, 0.9), rel=1e-9)
        assert best > 0.86

    def test_optimum_beats_fixed_gains(self, lossy_channel):
        state = GaussianInput(0.5, 0.3)
        _, best = limits_opt.optimize_lambda(state, lossy_channel)
        for lam in (0.5, 0.9, 1.0, 1.3):
            assert best >= limits_opt.fidelity_at(state, lossy_channel, lam) - 1e-9

    def test_unit_gain_degrades_with_squeezing(self):
        """With lossy arms, lambda=1 loses fidelity as zeta grows while |T2/T1| gains."""
        state = GaussianInput(0.5)
        weak = ChannelParams(zeta_mag=0.0, T2=0.6)
        strong = weak.with_squeezing(2.0)
        assert limits_opt.fidelity_at(state, weak, 1.0) == pytest.approx(0.443, abs=1e-3)
        assert limits_opt.fidelity_at(state, weak, 0.6) == pytest.approx(0.652, abs=1e-3)
        assert limits_opt.fidelity_at(state, strong, 1.0) < limits_opt.fidelity_at(state, weak, 1.0)
        assert limits_opt.fidelity_at(state, strong, 0.6) > limits_opt.fidelity_at(state, weak, 0.6)

    def test_saturation_below_unity(self):
        """F at lambda=|T2/T1| rises with zeta and saturates below one."""
        state = GaussianInput(0.5)
        p = ChannelParams(zeta_mag=0.0, T2=0.9)
        rows = limits_opt.fidelity_vs_squeezing(state, p, [0.0, 1.0, 2.0, 5.0, 15.0, 20.0])
        values = [f for _, _, f in rows]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert abs(values[-1] - values[-2]) < 1e-6
        assert values[-1] < 1.0

    def test_undefined_rule_gives_nan(self):
        """The dotted gain needs entanglement; zeta=0 yields NaN."""
        rows = limits_opt.fidelity_vs_squeezing(GaussianInput(0.0), ChannelParams(zeta_mag=0.0), [0.0, 1.0], "dotted")
        assert math.isnan(rows[0][2])
        assert math.isfinite(rows[1][2])

    def test_rows_keep_input_order(self, lossy_channel):
        zetas = [2.0, 0.5, 1.0]
        rows = limits_opt.fidelity_vs_squeezing(GaussianInput(0.2), lossy_channel, zetas, "one")
        assert [z for z, _, _ in rows] == zetas
        assert all(lam == 1.0 for _, lam, _ in rows)


class TestAverageFidelity:
    """Tests for the Gaussian-regularized average over coherent amplitudes."""

    @pytest.mark.parametrize("zeta0, n_coh, lam", [(0.0, 1.0, 1.0), (0.5, 10.0, 0.9), (0.0, 100.0, 0.7)])
    def test_matches_closed_form(self, lossy_channel, zeta0, n_coh, lam):
        spec = limits_opt.AverageFidelitySpec(n_coh=n_coh)
        numeric = limits_opt.average_fidelity(spec, lossy_channel, lam, zeta0)
        exact = limits_opt.average_fidelity_closed_form(spec, lossy_channel, lam, zeta0)
        assert numeric == pytest.approx(exact, rel=1e-9)

    def test_unit_gain_average_is_flat(self):
        """At lambda=1 the average equals the fidelity at alpha0=0 for any n_coh."""
        p = ChannelParams(zeta_mag=1.0)
        f0 = limits_opt.fidelity_at(GaussianInput(0.0), p, 1.0)
        for n_coh in (1.0, 50.0):
            spec = limits_opt.AverageFidelitySpec(n_coh=n_coh)
            assert limits_opt.average_fidelity(spec, p, 1.0) == pytest.approx(f0, rel=1e-9)

    def test_unconverged_quadrature_raises(self, lossy_channel):
        """An oscillating integrand is flagged instead of returned."""
        spec = limits_opt.AverageFidelitySpec(n_coh=100.0, order=8)

        def wobble(zeta0, setting):
            return lambda alpha0: 0.5 + 0.4 * np.cos(5.0 * np.real(alpha0))

        with patch("src.limits_opt.fidelity_surface", wobble):
            with pytest.raises(QuadratureError):
                limits_opt.average_fidelity(spec, lossy_channel, 0.9)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            limits_opt.AverageFidelitySpec(n_coh=0.0)
        with pytest.raises(DomainError):
            limits_opt.AverageFidelitySpec(n_coh=1.0, order=1)

    @pytest.mark.parametrize("n_coh", [1.0, 10.0, 100.0])
    def test_optimum_at_large_squeezing(self, n_coh):
        """At zeta=20 the average is maximized at |T2/T1| whatever the cutoff."""
        p = ChannelParams(zeta_mag=20.0, T2=0.5)
        lam, _ = limits_opt.optimal_lambda_for_average(limits_opt.AverageFidelitySpec(n_coh=n_coh), p)
        assert lam == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("n_coh", [1.0, 10.0, 100.0])
    def test_optimal_average_not_below_star(self, n_coh):
        """The reported maximum of the average is at least its value at |T2/T1|."""
        p = ChannelParams(zeta_mag=20.0, T2=0.5)
        spec = limits_opt.AverageFidelitySpec(n_coh=n_coh)
        _, value = limits_opt.optimal_lambda_for_average(spec, p)
        at_star = limits_opt.average_fidelity(spec, p, 0.5)
        assert value >= at_star - 1e-12
        assert value == pytest.approx(limits_opt.average_fidelity_closed_form(spec, p, 0.5), rel=1e-6)

    def test_optimum_moves_toward_star_with_squeezing(self):
        """Stronger squeezing pulls the optimal gain down toward |T2/T1|."""
        p = ChannelParams(zeta_mag=3.0, T2=0.5)
        (at_3,) = limits_opt.optimal_lambda_vs_ncoh(p, 0.0, [10.0])
        (at_4,) = limits_opt.optimal_lambda_vs_ncoh(p.with_squeezing(4.0), 0.0, [10.0])
        assert at_4.lam_opt < at_3.lam_opt
        assert at_3.n_coh == 10.0


class TestSourcePlacement:
    """Tests for the optimal TMSV source position."""

    STATES = [GaussianInput(0.78, 0.5), GaussianInput(1.44, 1.0), FockInput(1), FockInput(5)]

    @pytest.mark.parametrize("state", STATES)
    def test_source_nearer_alice(self, state):
        """0 <= l1_opt < l12/2 and the ratio grows with l12."""
        ratios = []
        for l12 in (0.05, 0.1, 0.2):
            l1, best = limits_opt.optimize_source_position(state, l12)
            assert 0.0 <= l1 < 0.5 * l12
            assert 0.0 < best <= 1.0
            ratios.append(l1 / l12)
        assert all(b >= a - 1e-4 for a, b in zip(ratios, ratios[1:]))

    def test_zero_length_is_perfect(self):
        l1, best = limits_opt.optimize_source_position(FockInput(2), 0.0)
        assert l1 == 0.0
        assert best == pytest.approx(1.0, abs=1e-9)

    def test_optimum_dominates_profile(self):
        state = GaussianInput(0.78, 0.5)
        _, best = limits_opt.optimize_source_position(state, 0.1)
        profile = limits_opt.source_position_profile(state, 0.1, count=11)
        assert len(profile) == 11
        assert best >= max(f for _, f in profile) - 1e-9

    def test_invalid_lengths(self):
        with pytest.raises(DomainError):
            limits_opt.optimize_source_position(FockInput(1), -0.1)
        with pytest.raises(DomainError):
            limits_opt.optimize_source_position(FockInput(1), 0.1, lA=0.0)

    def test_fidelity_falls_with_length(self):
        rows = limits_opt.fidelity_vs_length(FockInput(1), [0.0, 0.1, 0.3])
        values = [f for _, f in rows]
        assert values[0] == pytest.approx(1.0, abs=1e-9)
        assert values[0] > values[1] > values[2]


class TestLimits:
    """Tests for classical levels and distance estimates."""

    def test_vacuum_classical_level(self, lossy_channel):
        assert limits_opt.classical_level(GaussianInput(0.0), lossy_channel) == pytest.approx(1.0 / 1.81, rel=1e-10)

    def test_single_photon_classical_level(self):
        assert limits_opt.classical_level(FockInput(1), ChannelParams(zeta_mag=2.0), 1.0) == pytest.approx(0.25)

    def test_feature_scale(self):
        assert limits_opt.feature_scale(FockInput(0)) == 1.0
        assert limits_opt.feature_scale(FockInput(4)) == pytest.approx(0.5)
        assert limits_opt.feature_scale(GaussianInput(1.0)) == pytest.approx(math.exp(-1.0))

    @pytest.mark.parametrize("margin", [0.05, 0.2])
    def test_squeezing_scaling(self, margin):
        """l_T scales as exp(-2 zeta0)."""
        ratio = limits_opt.max_distance(GaussianInput(2.0), margin) / limits_opt.max_distance(GaussianInput(1.5), margin)
        assert ratio == pytest.approx(math.exp(-1.0), rel=0.1)

    @pytest.mark.parametrize("margin", [0.05, 0.2])
    def test_photon_number_scaling(self, margin):
        """l_T scales as 1/N."""
        ratio = limits_opt.max_distance(FockInput(16), margin) / limits_opt.max_distance(FockInput(8), margin)
        assert ratio == pytest.approx(0.5, rel=0.1)

    def test_scales_with_attenuation_length(self):
        assert limits_opt.max_distance(FockInput(3), 0.1, lA=2.0) == pytest.approx(
            2.0 * limits_opt.max_distance(FockInput(3), 0.1)
        )

    def test_unbounded_distance(self):
        """A loose margin on the vacuum gives no finite limit."""
        assert limits_opt.max_distance(FockInput(0), 0.6) == math.inf

    @pytest.mark.parametrize("margin", [0.0, 1.0, -0.2])
    def test_margin_domain(self, margin):
        with pytest.raises(DomainError):
            limits_opt.max_distance(FockInput(1), margin)

    def test_noise_budget(self):
        p = channel.from_lengths(0.0, 0.1, zeta_mag=20.0)
        budget = limits_opt.noise_budget(FockInput(4), p)
        assert budget.sigma == pytest.approx(budget.sigma_inf, rel=1e-8)
        assert budget.delta_w == pytest.approx(0.5)
        assert budget.l_12 == pytest.approx(0.1)
        assert budget.l_t == pytest.approx(limits_opt.max_distance(FockInput(4)))
