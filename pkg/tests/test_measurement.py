"""
Tests for Alice's measurement, Bob's conditional states and the Monte-Carlo rebuild.
"""
import math

import numpy as np
import pytest
from scipy import integrate

from src.core import channel, teleport
from src.core.channel import ChannelParams
from src.core.gaussian_core import teleport_map, to_moments
from src.core.measurement import (
    conditional_state,
    MeasurementOutcome,
    displaced_conditional_state,
    mix_conditional_states_on_lattice,
    monte_carlo_output,
    outcome_distribution,
)
from src.core.teleport import GaussianInput
from src.errors import DomainError, SeedRequired


@pytest.fixture
def setup(lossy_channel):
    """Squeezed coherent input through the lossy channel at lambda = |T2/T1|."""
    state = GaussianInput(0.4, 0.5 - 0.3j)
    return state, channel.shared_state(lossy_channel), teleport.setting_for(lossy_channel)


class TestOutcomeDistribution:
    """Tests for the law of the homodyne outcome."""

    def test_unit_mass(self, setup):
        state, e, _ = setup
        dist = outcome_distribution(state, e)
        axis = np.linspace(-8.0, 8.0, 401)
        gamma = axis[np.newaxis, :] + 1j * axis[:, np.newaxis]
        mass = integrate.trapezoid(integrate.trapezoid(dist.density(gamma), axis, axis=1), axis)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_mean_is_input_mean(self, setup):
        state, e, _ = setup
        assert outcome_distribution(state, e).mean == pytest.approx(0.5 - 0.3j)

    def test_covariance_adds_c1_term(self, setup):
        state, e, _ = setup
        _, cov_in = to_moments(state.wigner())
        expected = cov_in + 0.25 * e.C1 * e.script_N * np.eye(2)
        np.testing.assert_allclose(outcome_distribution(state, e).covariance, expected, rtol=1e-12)


class TestConditionalStates:
    """Tests for Bob's states after a given outcome."""

    def test_outcome_record_matches_raw_value(self, setup):
        state, e, s = setup
        a = displaced_conditional_state(state, e, s, MeasurementOutcome(0.4 - 0.2j))
        b = displaced_conditional_state(state, e, s, 0.4 - 0.2j)
        assert a.C == pytest.approx(b.C)
        assert a.D == pytest.approx(b.D)

    def test_conditional_state_is_normalized(self, setup):
        state, e, _ = setup
        assert conditional_state(state, e, 0.3 + 0.1j).is_normalized(tol=1e-10)

    def test_covariance_independent_of_outcome(self, setup):
        state, e, _ = setup
        _, a = to_moments(conditional_state(state, e, 0j))
        _, b = to_moments(conditional_state(state, e, 1.5 - 2.0j))
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_displacement_shifts_mean(self, setup):
        state, e, s = setup
        g = 0.2 + 0.4j
        plain, _ = to_moments(conditional_state(state, e, g))
        shifted, _ = to_moments(displaced_conditional_state(state, e, s, g))
        assert shifted - plain == pytest.approx(s.lam * g, abs=1e-12)

    def test_mixture_reproduces_teleported_state(self, setup):
        """The P(g')-weighted mixture has the moments of the closed-form output."""
        state, e, s = setup
        mean, cov = mix_conditional_states_on_lattice(state, e, s)
        ref_mean, ref_cov = to_moments(teleport_map(state.wigner(), s.sigma, s.lam))
        assert mean == pytest.approx(ref_mean, abs=1e-8)
        np.testing.assert_allclose(cov, ref_cov, rtol=1e-6)


class TestMonteCarlo:
    """Tests for the seeded Monte-Carlo estimate."""

    def test_seed_required(self, setup):
        state, e, s = setup
        with pytest.raises(SeedRequired):
            monte_carlo_output(state, e, s, 100, None)

    def test_rejects_empty_run(self, setup):
        state, e, s = setup
        with pytest.raises(DomainError):
            monte_carlo_output(state, e, s, 0, 1)

    def test_reproducible(self, setup):
        """Same seed, same streams: identical estimate regardless of threads."""
        state, e, s = setup
        a = monte_carlo_output(state, e, s, 5000, seed=11, threads=1)
        b = monte_carlo_output(state, e, s, 5000, seed=11, threads=4)
        assert a.model_dump() == b.model_dump()

    @pytest.mark.slow
    @pytest.mark.parametrize("state, p", [
        (GaussianInput(0.0, 0j), ChannelParams(zeta_mag=0.5)),
        (GaussianInput(0.4, 0.5 - 0.3j), ChannelParams(zeta_mag=1.0, T2=0.9)),
        (GaussianInput(0.88, 1.0), ChannelParams(zeta_mag=1.5, T1=0.95, T2=0.8)),
    ])
    def test_agrees_with_closed_form(self, state, p):
        """The estimate lies within three standard errors of the closed form."""
        s = teleport.setting_for(p)
        est = monte_carlo_output(state, channel.shared_state(p), s, 100_000, seed=2024)
        reference = teleport.fidelity_value(state, s)
        assert abs(est.fidelity - reference) <= 3.0 * est.standard_error

    def test_output_moments(self, setup):
        """Averaged moments approach those of the closed-form output."""
        state, e, s = setup
        est = monte_carlo_output(state, e, s, 50_000, seed=5)
        ref_mean, ref_cov = to_moments(teleport_map(state.wigner(), s.sigma, s.lam))
        assert complex(est.mean_real, est.mean_imag) == pytest.approx(ref_mean, abs=0.02)
        np.testing.assert_allclose(np.array(est.covariance), ref_cov, rtol=0.05, atol=0.01)
