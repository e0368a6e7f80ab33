"""
Alice's measurement, Bob's conditional states and a Monte-Carlo rebuild of
the averaged output.

For a Gaussian input with mean m and covariance V_in, the joint density of
the outcome g' and Bob's conditional variable b factorizes as

    f(g', b) = N(b; 0, s_b I) * N(g' + M b; m, V_in + s_a I)

with s_b = C2 N / 4, s_a = 1 / (4 C2) and M the real 2x2 matrix of
multiplication by S*/C2. Marginalizing b gives the outcome distribution
N(m, V_in + (C1 N / 4) I); conditioning gives Bob's state before the
displacement e^{i phi_tilde} lambda g'.
"""

from __future__ import annotations

import cmath
import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel

from ..errors import DomainError, SeedRequired
from ..utils import ordered_map
from .channel import EntangledState
from .gaussian_core import GaussianWigner, from_moments, to_moments
from .teleport import GaussianInput, TeleportSetting

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementOutcome:
    gamma_prime: complex


def _outcome_value(outcome: Union[MeasurementOutcome, complex]) -> complex:
    if isinstance(outcome, MeasurementOutcome):
        return complex(outcome.gamma_prime)
    return complex(outcome)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Gaussian law of g' over (Re g', Im g')."""

    mean: complex
    covariance: np.ndarray

    def __post_init__(self) -> None:
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (2, 2) or np.any(np.linalg.eigvalsh(0.5 * (cov + cov.T)) <= 0.0):
            raise DomainError(f"outcome covariance is not positive definite: {cov.tolist()}")
        object.__setattr__(self, "covariance", cov)

    def density(self, gamma_prime: np.ndarray) -> np.ndarray:
        """P(g') with unit total probability over d^2 g'."""
        gamma_prime = np.asarray(gamma_prime, dtype=complex)
        d = np.stack([(gamma_prime - self.mean).real, (gamma_prime - self.mean).imag], axis=-1)
        inv = np.linalg.inv(self.covariance)
        quad = np.einsum("...i,ij,...j->...", d, inv, d)
        return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(np.linalg.det(self.covariance)))


def _multiplier(w: complex) -> np.ndarray:
    """Real matrix acting on (Re z, Im z) as z -> w z."""
    return np.array([[w.real, -w.imag], [w.imag, w.real]])


def _input_moments(state: GaussianInput) -> Tuple[complex, np.ndarray]:
    return to_moments(state.wigner())


def outcome_distribution(state: GaussianInput, e: EntangledState) -> OutcomeDistribution:
    """Distribution of the rescaled homodyne outcome g'."""
    mean, cov = _input_moments(state)
    return OutcomeDistribution(mean=mean, covariance=cov + 0.25 * e.C1 * e.script_N * np.eye(2))


@dataclass(frozen=True)
class _Conditioner:
    """Precomputed pieces of the conditional law of b given g'."""

    mean_in: complex
    gain: np.ndarray  # maps (g' - m) to the conditional mean of b
    covariance: np.ndarray

    @classmethod
    def build(cls, state: GaussianInput, e: EntangledState) -> "_Conditioner":
        mean_in, cov_in = _input_moments(state)
        s_b = 0.25 * e.C2 * e.script_N
        s_a = 0.25 / e.C2
        M = _multiplier(e.S.conjugate() / e.C2)
        inv_a = np.linalg.inv(cov_in + s_a * np.eye(2))
        cov_c = np.linalg.inv(np.eye(2) / s_b + M.T @ inv_a @ M)
        return cls(mean_in=mean_in, gain=-cov_c @ M.T @ inv_a, covariance=cov_c)

    def mean(self, gamma_prime: complex) -> complex:
        d = gamma_prime - self.mean_in
        v = self.gain @ np.array([d.real, d.imag])
        return complex(v[0], v[1])


def conditional_state(
    state: GaussianInput, e: EntangledState, outcome: Union[MeasurementOutcome, complex]
) -> GaussianWigner:
    """Bob's normalized state after outcome g', before any displacement."""
    cond = _Conditioner.build(state, e)
    return from_moments(cond.mean(_outcome_value(outcome)), cond.covariance)


def displaced_conditional_state(
    state: GaussianInput, e: EntangledState, s: TeleportSetting, outcome: Union[MeasurementOutcome, complex]
) -> GaussianWigner:
    """Conditional state shifted by e^{i phi_tilde} lambda g'."""
    cond = _Conditioner.build(state, e)
    gamma_prime = _outcome_value(outcome)
    shift = cmath.exp(1j * s.phi_tilde) * s.lam * gamma_prime
    return from_moments(cond.mean(gamma_prime) + shift, cond.covariance)


class MonteCarloEstimate(BaseModel):
    """Sampled average of displaced conditional states."""

    fidelity: float
    standard_error: float
    n_samples: int
    seed: int
    mean_real: float
    mean_imag: float
    covariance: List[List[float]]
    closed_form: Optional[float] = None
    z_score: Optional[float] = None


def _chunk_statistics(args) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    state, cond, s, dist, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    draws = rng.multivariate_normal(
        [dist.mean.real, dist.mean.imag], dist.covariance, size=size, method="cholesky"
    )
    rotation = cmath.exp(1j * s.phi_tilde) * s.lam
    gp = draws[:, 0] + 1j * draws[:, 1]
    d = gp - cond.mean_in
    shifted = cond.gain @ np.stack([d.real, d.imag])
    means = shifted[0] + 1j * shifted[1] + rotation * gp

    # pi * integral of two Gaussians = pi * N(mu - m; 0, V_in + V_c)
    mean_in, cov_in = _input_moments(state)
    joint = cov_in + cond.covariance
    inv = np.linalg.inv(joint)
    offset = np.stack([(means - mean_in).real, (means - mean_in).imag], axis=-1)
    quad = np.einsum("ki,ij,kj->k", offset, inv, offset)
    overlaps = np.exp(-0.5 * quad) / (2.0 * math.sqrt(np.linalg.det(joint)))
    return overlaps, means, draws


def monte_carlo_output(
    state: GaussianInput,
    e: EntangledState,
    s: TeleportSetting,
    n_samples: int,
    seed: Optional[int],
    streams: int = 4,
    threads: Optional[int] = None,
) -> MonteCarloEstimate:
    """
    Rebuild the averaged output from sampled outcomes.

    Samples g' from the outcome distribution in `streams` independent
    sub-streams spawned from `seed`, forms the displaced conditional state
    for each draw and averages its overlap with the input and its moments.
    Results depend only on (seed, streams, n_samples), never on threads.

    Raises:
        SeedRequired: If seed is None.
        DomainError: If n_samples < 1.
    """
    if seed is None:
        raise SeedRequired("monte_carlo_output needs an explicit seed")
    if n_samples < 1:
        raise DomainError(f"n_samples={n_samples!r} must be positive")

    dist = outcome_distribution(state, e)
    cond = _Conditioner.build(state, e)
    streams = max(1, min(streams, n_samples))
    sizes = [n_samples // streams + (1 if k < n_samples % streams else 0) for k in range(streams)]
    children = np.random.SeedSequence(seed).spawn(streams)
    logger.info(f"Monte-Carlo: {n_samples} samples in {streams} streams (seed={seed})")

    chunks = ordered_map(
        _chunk_statistics,
        [(state, cond, s, dist, size, child) for size, child in zip(sizes, children)],
        threads=threads,
    )
    overlaps = np.concatenate([c[0] for c in chunks])
    means = np.concatenate([c[1] for c in chunks])

    fidelity = float(np.mean(overlaps))
    stderr = float(np.std(overlaps, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    mean_out = complex(np.mean(means))
    spread = np.stack([means.real, means.imag])
    cov_out = cond.covariance + np.cov(spread, bias=True)
    return MonteCarloEstimate(
        fidelity=fidelity,
        standard_error=stderr,
        n_samples=n_samples,
        seed=seed,
        mean_real=mean_out.real,
        mean_imag=mean_out.imag,
        covariance=cov_out.tolist(),
    )


def mix_conditional_states_on_lattice(
    state: GaussianInput,
    e: EntangledState,
    s: TeleportSetting,
    n: int = 41,
    width: float = 6.0,
) -> Tuple[complex, np.ndarray]:
    """
    Mean and covariance of the P(g')-weighted mixture of displaced conditional states.

    The outcome plane is covered by an n x n lattice spanning `width` standard
    deviations of the outcome distribution on each side; weights are the
    normalized lattice values of P(g').
    """
    dist = outcome_distribution(state, e)
    cond = _Conditioner.build(state, e)
    evals, evecs = np.linalg.eigh(dist.covariance)
    ticks = np.linspace(-width, width, n)
    u, v = np.meshgrid(ticks, ticks)
    local = np.stack([u.ravel() * math.sqrt(evals[0]), v.ravel() * math.sqrt(evals[1])])
    points = evecs @ local
    gp = dist.mean + points[0] + 1j * points[1]
    weights = dist.density(gp)
    weights = weights / weights.sum()

    rotation = cmath.exp(1j * s.phi_tilde) * s.lam
    d = gp - cond.mean_in
    shifted = cond.gain @ np.stack([d.real, d.imag])
    mus = shifted[0] + 1j * shifted[1] + rotation * gp

    mean = complex(np.sum(weights * mus))
    centred = np.stack([(mus - mean).real, (mus - mean).imag])
    cov = cond.covariance + (centred * weights) @ centred.T
    return mean, cov
