"""
End-to-end teleported states and fidelities.

Closed forms cover the two input families: squeezed coherent states and
number states. Number-state expressions are evaluated through scaled
three-term recurrences

    Q_n = x^n P_n(1 + c/x),     M_n = u^n L_n(-t/u)

which stay polynomial in x and u, so the removable singularities at
x = lambda^2 (4 sigma - 1) - 1 = 0 and u = 4 sigma - 1 = 0 never divide by
zero. The grid route through the oracle is exposed as fidelity_numeric.
"""

from __future__ import annotations

import cmath
import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from ..config import NumericsConfig
from ..errors import DomainError
from . import channel
from .channel import ChannelParams
from .gaussian_core import (
    GaussianWigner,
    gaussian_overlap,
    rotate,
    squeezed_coherent,
    teleport_map,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianInput:
    """Squeezed coherent input with real squeezing zeta0 and amplitude alpha0."""

    zeta0: float
    alpha0: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        if not (math.isfinite(self.zeta0) and cmath.isfinite(self.alpha0)):
            raise DomainError(f"non-finite squeezed-state parameters zeta0={self.zeta0!r}, alpha0={self.alpha0!r}")

    def wigner(self) -> GaussianWigner:
        return squeezed_coherent(self.zeta0, self.alpha0)


@dataclass(frozen=True)
class FockInput:
    """N-photon number state."""

    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Fock number N={self.n!r} must be a nonnegative integer")
        if self.n > NumericsConfig.N_MAX:
            raise DomainError(f"Fock number N={self.n} exceeds N_max={NumericsConfig.N_MAX}")
        object.__setattr__(self, "n", int(self.n))

InputState = Union[GaussianInput, FockInput]


@dataclass(frozen=True)
class TeleportSetting:
    """Displacement gain, output rotation and kernel variance of one run."""

    lam: float
    sigma: float
    phi_tilde: float = 0.0
    sigma_classical: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise DomainError(f"lambda={self.lam!r} must be positive")
        if not self.sigma > 0.0:
            raise DomainError(f"sigma={self.sigma!r} must be positive")
        if self.sigma_classical is not None and not self.sigma_classical > 0.0:
            raise DomainError(f"sigma_classical={self.sigma_classical!r} must be positive")

    @property
    def classical_sigma(self) -> float:
        """Kernel variance of the same setup without entanglement.

        Falls back to lossless arms, (1 + lambda^2)/(4 lambda^2), when the
        setting was not built from channel parameters.
        """
        if self.sigma_classical is not None:
            return self.sigma_classical
        return (1.0 + self.lam ** 2) / (4.0 * self.lam ** 2)

    def classical(self) -> "TeleportSetting":
        return TeleportSetting(lam=self.lam, sigma=self.classical_sigma, phi_tilde=self.phi_tilde)


class FidelityReport(BaseModel):
    """Fidelity of one teleportation setup and its classical benchmark."""

    F: float = Field(ge=0.0, le=1.0 + 1e-9)
    classical_level: float = Field(ge=0.0, le=1.0 + 1e-9)
    exceeded_classical: bool
    lam: float
    sigma: float
    method: str = "closed_form"


def setting_for(
    p: ChannelParams,
    lam: Union[float, str] = "auto",
    infinite_squeezing: bool = False,
) -> TeleportSetting:
    """
    Teleport setting for channel p.

    Args:
        p: Channel parameters.
        lam: Gain, or "auto" for |T2/T1|.
        infinite_squeezing: Use the |zeta| -> infinity kernel variance. Lossless
            arms give sigma -> 0, floored at the identity limit.

    Raises:
        DomainError: If infinite_squeezing is set and lam differs from |T2/T1|,
            where the limiting variance diverges.
    """
    gain = channel.lambda_star(p) if lam == "auto" else float(lam)
    if infinite_squeezing:
        s = channel.sigma_limit(p, gain)
        if math.isinf(s):
            raise DomainError(
                f"kernel variance diverges as |zeta| -> infinity for lambda={gain!r} != |T2/T1|"
            )
        s = max(s, NumericsConfig.IDENTITY_SIGMA)
    else:
        s = channel.sigma(p, gain)
    s_classical = channel.sigma(p.with_squeezing(0.0), gain)
    logger.debug(f"Setting for zeta={p.zeta_mag}: lambda={gain}, sigma={s}, sigma_classical={s_classical}")
    return TeleportSetting(lam=gain, sigma=s, phi_tilde=channel.phi_tilde(p), sigma_classical=s_classical)


def mean_photon_number(state: InputState) -> float:
    if isinstance(state, FockInput):
        return float(state.n)
    return math.sinh(state.zeta0) ** 2 + abs(state.alpha0) ** 2


def _require_zero_phase(s: TeleportSetting) -> None:
    if abs(s.phi_tilde) > 1e-12:
        raise DomainError(
            f"closed-form squeezed-state fidelity needs phi_tilde = 0, got {s.phi_tilde!r}; "
            "rotate the input or use the overlap route"
        )


# Squeezed coherent states

def output_state_gaussian(state: GaussianInput, s: TeleportSetting) -> GaussianWigner:
    """Averaged output state for a squeezed coherent input, rotated by phi_tilde."""
    ch = math.cosh(2.0 * state.zeta0)
    sh = math.sinh(2.0 * state.zeta0)
    sig, lam = s.sigma, s.lam
    a0 = state.alpha0
    den = 1.0 + 8.0 * sig * ch + 16.0 * sig * sig
    A_out = 2.0 * (ch + 4.0 * sig) / (lam * lam * den)
    B_out = sh / (lam * lam * den)
    C_out = 2.0 * (a0 * (ch + 4.0 * sig) + a0.conjugate() * sh) / (lam * den)
    N_out = 2.0 / (lam * lam * math.sqrt(den))
    D_out = (2.0 * abs(a0) ** 2 * (ch + 4.0 * sig) + 2.0 * (a0 * a0).real * sh) / den
    out = GaussianWigner(A=A_out, B=complex(B_out), C=complex(C_out), D=D_out, N=N_out)
    return rotate(out, s.phi_tilde) if s.phi_tilde else out


def _squeezed_vacuum_fidelity(zeta0: float, sigma: float, lam: float) -> float:
    lam2 = lam * lam
    bracket = (
        1.0
        + 2.0 * lam2
        + lam2 * lam2 * (1.0 + 16.0 * sigma * sigma)
        + 8.0 * lam2 * (1.0 + lam2) * sigma * math.cosh(2.0 * zeta0)
    )
    return 2.0 / math.sqrt(bracket)


def amplitude_rates(zeta0: float, sigma: float, lam: float) -> tuple[float, float]:
    """
    Decay rates (a, b) of F(alpha0) = F0 exp(-a Re(alpha0)^2 - b Im(alpha0)^2).
    """
    e2 = math.exp(2.0 * zeta0)
    lam2 = lam * lam
    d1 = 1.0 + lam2 * (1.0 + 4.0 * e2 * sigma)
    d2 = (1.0 + lam2) * e2 + 4.0 * lam2 * sigma
    weight = 2.0 * (1.0 - lam) ** 2
    return weight * e2 / d1, weight / d2


def _squeezed_fidelity(zeta0: float, alpha0, sigma: float, lam: float):
    """F for a scalar or array of amplitudes alpha0."""
    a, b = amplitude_rates(zeta0, sigma, lam)
    alpha0 = np.asarray(alpha0, dtype=complex)
    value = _squeezed_vacuum_fidelity(zeta0, sigma, lam) * np.exp(-a * alpha0.real ** 2 - b * alpha0.imag ** 2)
    return float(value) if value.ndim == 0 else value


def fidelity_squeezed(state: GaussianInput, s: TeleportSetting) -> FidelityReport:
    """Closed-form fidelity for a squeezed coherent input."""
    _require_zero_phase(s)
    F = _squeezed_fidelity(state.zeta0, state.alpha0, s.sigma, s.lam)
    level = _squeezed_fidelity(state.zeta0, state.alpha0, s.classical_sigma, s.lam)
    return FidelityReport(
        F=F, classical_level=level, exceeded_classical=F > level, lam=s.lam, sigma=s.sigma
    )


# Number states

def _scaled_legendre(n: int, x: float, c: float) -> float:
    """x^n P_n(1 + c/x), finite at x = 0."""
    q_prev, q = 1.0, x + c
    if n == 0:
        return q_prev
    for k in range(1, n):
        q_prev, q = q, ((2 * k + 1) * (x + c) * q - k * x * x * q_prev) / (k + 1)
    return q


def _scaled_laguerre(n: int, u: float, t: np.ndarray) -> np.ndarray:
    """u^n L_n(-t/u), finite at u = 0."""
    m_prev = np.ones_like(t)
    if n == 0:
        return m_prev
    m = u + t
    for k in range(1, n):
        m_prev, m = m, (((2 * k + 1) * u + t) * m - k * u * u * m_prev) / (k + 1)
    return m


def _fock_fidelity(n: int, sigma: float, lam: float) -> float:
    lam2 = lam * lam
    x = lam2 * (4.0 * sigma - 1.0) - 1.0
    y = lam2 * (4.0 * sigma + 1.0) + 1.0
    c = 8.0 * lam2 / y
    # 2 Q_N / y^(N+1), with Q_N / y^N accumulated stepwise to keep large N finite
    return 2.0 * _scaled_legendre(n, x / y, c / y) / y


def fidelity_fock(state: FockInput, s: TeleportSetting) -> FidelityReport:
    """Closed-form fidelity for a number-state input; phase-insensitive."""
    F = _fock_fidelity(state.n, s.sigma, s.lam)
    level = _fock_fidelity(state.n, s.classical_sigma, s.lam)
    return FidelityReport(
        F=F, classical_level=level, exceeded_classical=F > level, lam=s.lam, sigma=s.sigma
    )


def output_state_fock(state: FockInput, s: TeleportSetting) -> Callable[[np.ndarray], np.ndarray]:
    """
    Teleported number-state Wigner function as a callable of beta.

    Raises:
        DomainError: At sigma = 1/4 exactly for N > 0.
    """
    n = state.n
    sig, lam = s.sigma, s.lam
    if n > 0 and sig == 0.25:
        raise DomainError("number-state output is singular at sigma = 1/4 exactly")
    u = 4.0 * sig - 1.0
    v = 4.0 * sig + 1.0
    lam2 = lam * lam
    phase = s.phi_tilde

    def wigner(beta):
        beta = np.asarray(beta, dtype=complex)
        if phase:
            beta = beta * cmath.exp(-1j * phase)
        r2 = np.abs(beta) ** 2
        t = 4.0 * r2 / (lam2 * v)
        # M_N / v^N, scaled stepwise
        m = _scaled_laguerre(n, u / v, t / v)
        value = 2.0 / (math.pi * lam2 * v) * m * np.exp(-2.0 * r2 / (lam2 * v))
        return float(value) if np.ndim(value) == 0 else value

    return wigner


# Dispatch

def fidelity(state: InputState, s: TeleportSetting) -> FidelityReport:
    """Closed-form fidelity for either input family."""
    if isinstance(state, FockInput):
        return fidelity_fock(state, s)
    return fidelity_squeezed(state, s)


def fidelity_value(state: InputState, s: TeleportSetting) -> float:
    """Fidelity only, without building the classical benchmark."""
    if isinstance(state, FockInput):
        return _fock_fidelity(state.n, s.sigma, s.lam)
    _require_zero_phase(s)
    return _squeezed_fidelity(state.zeta0, state.alpha0, s.sigma, s.lam)


def fidelity_overlap(state: GaussianInput, s: TeleportSetting) -> float:
    """Fidelity through the general Gaussian map and overlap; any phi_tilde."""
    g_in = state.wigner()
    out = teleport_map(g_in, s.sigma, s.lam)
    if s.phi_tilde:
        out = rotate(out, s.phi_tilde)
    return gaussian_overlap(g_in, out)


def fidelity_numeric(state: InputState, s: TeleportSetting, grid=None) -> FidelityReport:
    """
    Fidelity by brute-force phase-space quadrature.

    Args:
        state: Input state.
        s: Teleport setting.
        grid: Optional (half_width, n); chosen automatically when omitted.

    Raises:
        GridResolutionError: When no admissible grid resolves the states.
    """
    from .. import oracle

    F = oracle.fidelity_on_grid(state, s.sigma, s.lam, grid=grid, phi_tilde=s.phi_tilde)
    level = oracle.fidelity_on_grid(state, s.classical_sigma, s.lam, grid=grid, phi_tilde=s.phi_tilde)
    return FidelityReport(
        F=min(max(F, 0.0), 1.0),
        classical_level=min(max(level, 0.0), 1.0),
        exceeded_classical=F > level,
        lam=s.lam,
        sigma=s.sigma,
        method="grid",
    )
