"""
Two-mode squeezed vacuum shared through two lossy transmission arms.

The arms act as attenuators with transmission T_i, reflection R_i and thermal
occupation nth_i. All derived quantities are evaluated in forms that stay
exact at very large squeezing, where cosh(2|zeta|) reaches 1e17: with
b_i = 1 - |T_i|^2 + 2 nth_i (1 - |T_i|^2 - |R_i|^2) and K = cosh(2|zeta|),

    N        = b1 b2 + (b1 |T2|^2 + b2 |T1|^2) K + |T1 T2|^2
    4 l^2 s  = b2 + l^2 b1 + (|T2| - l|T1|)^2 K + 2 l |T1 T2| e^{-2|zeta|}
"""

from __future__ import annotations

import cmath
import math
import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ..errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelParams:
    """Physical description of the TMSV source and the two arms."""

    zeta_mag: float
    phi: float = 0.0
    T1: complex = 1.0 + 0j
    T2: complex = 1.0 + 0j
    R1: complex = 0j
    R2: complex = 0j
    nth1: float = 0.0
    nth2: float = 0.0
    l1: float | None = None
    l2: float | None = None
    lA1: float = 1.0
    lA2: float = 1.0

    def __post_init__(self) -> None:
        if not self.zeta_mag >= 0.0 or not math.isfinite(self.zeta_mag):
            raise DomainError(f"zeta_mag={self.zeta_mag!r} must be a finite nonnegative number")
        for name in ("T1", "T2", "R1", "R2"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for i, (t, r, n) in enumerate(((self.T1, self.R1, self.nth1), (self.T2, self.R2, self.nth2)), start=1):
            if abs(t) > 1.0 + 1e-15:
                raise DomainError(f"|T{i}|={abs(t)!r} exceeds 1")
            if abs(t) ** 2 + abs(r) ** 2 > 1.0 + 1e-12:
                raise DomainError(f"|T{i}|^2+|R{i}|^2={abs(t) ** 2 + abs(r) ** 2!r} exceeds 1")
            if not n >= 0.0:
                raise DomainError(f"nth{i}={n!r} must be nonnegative")
        if not (self.lA1 > 0.0 and self.lA2 > 0.0):
            raise DomainError(f"absorption lengths must be positive, got lA1={self.lA1!r}, lA2={self.lA2!r}")

    @property
    def t1(self) -> float:
        return abs(self.T1)

    @property
    def t2(self) -> float:
        return abs(self.T2)

    def with_squeezing(self, zeta_mag: float) -> "ChannelParams":
        """Same arms, different source squeezing."""
        return replace(self, zeta_mag=zeta_mag)

    def lengths(self) -> Tuple[float, float]:
        """Arm lengths, taken from |T_i| when not given explicitly."""
        l1 = self.l1 if self.l1 is not None else _length_from(self.t1, self.lA1)
        l2 = self.l2 if self.l2 is not None else _length_from(self.t2, self.lA2)
        return l1, l2


def _length_from(t: float, lA: float) -> float:
    return math.inf if t == 0.0 else -lA * math.log(t)


@dataclass(frozen=True)
class EntangledState:
    """Coefficients of the Gaussian two-mode state shared by Alice and Bob."""

    S: complex
    C1: float
    C2: float
    script_N: float

    def __post_init__(self) -> None:
        if not self.script_N > 0.0:
            raise DomainError(f"script_N={self.script_N!r} must be positive")


def from_lengths(
    l1: float,
    l2: float,
    lA1: float = 1.0,
    lA2: float = 1.0,
    zeta_mag: float = 0.0,
    phi: float = 0.0,
    nth1: float = 0.0,
    nth2: float = 0.0,
) -> ChannelParams:
    """
    Channel with |T_i| = exp(-l_i/lA_i), real transmissions and no reflection.

    Raises:
        DomainError: On negative lengths or nonpositive absorption lengths.
    """
    if l1 < 0.0 or l2 < 0.0:
        raise DomainError(f"lengths must be nonnegative, got l1={l1!r}, l2={l2!r}")
    if not (lA1 > 0.0 and lA2 > 0.0):
        raise DomainError(f"absorption lengths must be positive, got lA1={lA1!r}, lA2={lA2!r}")
    return ChannelParams(
        zeta_mag=zeta_mag,
        phi=phi,
        T1=complex(math.exp(-l1 / lA1)),
        T2=complex(math.exp(-l2 / lA2)),
        nth1=nth1,
        nth2=nth2,
        l1=l1,
        l2=l2,
        lA1=lA1,
        lA2=lA2,
    )


def thermal_occupation(omega: float, temperature: float, hbar_over_kb: float = 7.638232577e-12) -> float:
    """
    Planck occupation 1/(exp(hbar omega / kB T) - 1).

    Args:
        omega: Angular frequency in rad/s.
        temperature: Temperature in kelvin; zero gives zero occupation.
        hbar_over_kb: hbar/kB in K s.
    """
    if temperature < 0.0 or omega <= 0.0:
        raise DomainError(f"need omega > 0 and temperature >= 0, got {omega!r}, {temperature!r}")
    if temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(hbar_over_kb * omega / temperature)


def _noise_terms(p: ChannelParams) -> Tuple[float, float]:
    t1s, t2s = p.t1 ** 2, p.t2 ** 2
    b1 = 1.0 - t1s + 2.0 * p.nth1 * (1.0 - t1s - abs(p.R1) ** 2)
    b2 = 1.0 - t2s + 2.0 * p.nth2 * (1.0 - t2s - abs(p.R2) ** 2)
    return b1, b2


def script_n(p: ChannelParams) -> float:
    b1, b2 = _noise_terms(p)
    K = math.cosh(2.0 * p.zeta_mag)
    t1s, t2s = p.t1 ** 2, p.t2 ** 2
    return b1 * b2 + (b1 * t2s + b2 * t1s) * K + t1s * t2s


def shared_state(p: ChannelParams) -> EntangledState:
    """S, C1, C2 and script_N of the transmitted TMSV."""
    if p.nth1 > 0.0 or p.nth2 > 0.0:
        logger.debug(f"Thermal reservoirs (nth1={p.nth1}, nth2={p.nth2}): results are an extrapolation")
    b1, b2 = _noise_terms(p)
    K = math.cosh(2.0 * p.zeta_mag)
    norm = script_n(p)
    a1 = b1 + p.t1 ** 2 * K
    a2 = b2 + p.t2 ** 2 * K
    S = cmath.exp(1j * p.phi) * p.T1 * p.T2 * math.sinh(2.0 * p.zeta_mag) / norm
    return EntangledState(S=S, C1=a1 / norm, C2=a2 / norm, script_N=norm)


def tmsv_wigner_value(p: ChannelParams, alpha: complex, beta: complex) -> float:
    """Two-mode Wigner function of the transmitted state at (alpha, beta)."""
    e = shared_state(p)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    exponent = -2.0 * (
        e.C2 * np.abs(alpha) ** 2
        + e.C1 * np.abs(beta) ** 2
        + 2.0 * (e.S.conjugate() * alpha * beta).real
    )
    value = 4.0 / (math.pi ** 2 * e.script_N) * np.exp(exponent)
    return float(value) if np.ndim(value) == 0 else value


def tmsv_lossless_wigner_value(zeta_mag: float, phi: float, alpha: complex, beta: complex) -> float:
    """
    Two-mode Wigner function of the TMSV before transmission.

    Written in the same phase convention as the transmitted state, so that it
    coincides with tmsv_wigner_value at |T1| = |T2| = 1 and zero noise.
    """
    ch = math.cosh(2.0 * zeta_mag)
    sh = math.sinh(2.0 * zeta_mag)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    exponent = -2.0 * (np.abs(alpha) ** 2 + np.abs(beta) ** 2) * ch - 4.0 * sh * (
        cmath.exp(-1j * phi) * alpha * beta
    ).real
    value = 4.0 / math.pi ** 2 * np.exp(exponent)
    return float(value) if np.ndim(value) == 0 else value


def two_mode_covariance(p: ChannelParams) -> np.ndarray:
    """
    Covariance of (x1, y1, x2, y2) after both arms, vacuum variance 1/4.

    Built by propagating the TMSV covariance through two attenuators, which
    is independent of the closed forms in shared_state.
    """
    ch = math.cosh(2.0 * p.zeta_mag)
    sh = math.sinh(2.0 * p.zeta_mag)
    theta = p.phi + cmath.phase(p.T1) + cmath.phase(p.T2)
    Z = -np.array([[math.cos(theta), math.sin(theta)], [math.sin(theta), -math.cos(theta)]])
    eye = np.eye(2)
    V = 0.25 * np.block([[ch * eye, sh * Z], [sh * Z, ch * eye]])

    b1, b2 = _noise_terms(p)
    X = np.diag([p.t1, p.t1, p.t2, p.t2])
    noise = 0.25 * np.diag([b1, b1, b2, b2])
    return X @ V @ X + noise


def sigma(p: ChannelParams, lam: float) -> float:
    """
    Variance of the smearing kernel for displacement gain lam.

    Raises:
        DomainError: If lam <= 0.
    """
    if not lam > 0.0:
        raise DomainError(f"lambda={lam!r} must be positive")
    b1, b2 = _noise_terms(p)
    K = math.cosh(2.0 * p.zeta_mag)
    t1, t2 = p.t1, p.t2
    spread = (t2 - lam * t1) ** 2 * K + 2.0 * lam * t1 * t2 * math.exp(-2.0 * p.zeta_mag)
    return (b2 + lam * lam * b1 + spread) / (4.0 * lam * lam)


def sigma_limit(p: ChannelParams, lam: float) -> float:
    """
    Kernel variance in the limit |zeta| -> infinity.

    Finite only when lam equals |T2/T1|; includes the thermal terms.
    """
    if not lam > 0.0:
        raise DomainError(f"lambda={lam!r} must be positive")
    b1, b2 = _noise_terms(p)
    if not math.isclose(lam * p.t1, p.t2, rel_tol=1e-12, abs_tol=1e-15):
        return math.inf
    return (b2 + lam * lam * b1) / (4.0 * lam * lam)


def sigma_infinity(p: ChannelParams) -> float:
    """
    (|T1|^2 + |T2|^2 - 2|T1 T2|^2) / (4|T2|^2).

    Raises:
        DomainError: If T2 = 0.
    """
    t1s, t2s = p.t1 ** 2, p.t2 ** 2
    if t2s == 0.0:
        raise DomainError("sigma_infinity requires T2 != 0")
    return (t1s + t2s - 2.0 * t1s * t2s) / (4.0 * t2s)


def lambda_star(p: ChannelParams) -> float:
    """
    Recommended gain |T2/T1|.

    Raises:
        DomainError: If T1 = 0 or T2 = 0.
    """
    if p.t1 == 0.0:
        raise DomainError("lambda_star requires T1 != 0")
    if p.t2 == 0.0:
        raise DomainError("lambda_star requires T2 != 0 (gain would vanish)")
    return p.t2 / p.t1


def phi_tilde(p: ChannelParams) -> float:
    """Output rotation phi + arg T1 + arg T2."""
    return p.phi + cmath.phase(p.T1) + cmath.phase(p.T2)


def lambda_dotted(p: ChannelParams) -> float:
    """
    Alternative gain C2/|S| suggested by the conditional state.

    Raises:
        DomainError: If S = 0 (no squeezing or a dead arm).
    """
    e = shared_state(p)
    if abs(e.S) == 0.0:
        raise DomainError("C2/|S| is undefined for S = 0")
    return e.C2 / abs(e.S)

