"""
Optimization and limits of teleportation through lossy arms.

Covers the displacement-gain scan, the regularized average fidelity over
coherent amplitudes and its optimal gain, optimal placement of the TMSV
source between Alice and Bob, classical levels and the distance estimates
that follow from the high-fidelity condition sigma_inf << delta_W^2.
"""

from __future__ import annotations

import math
import sys
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .config import NumericsConfig
from .core import channel, teleport
from .core.channel import ChannelParams
from .core.teleport import FockInput, GaussianInput, InputState
from .errors import DomainError, QuadratureError
from .utils import golden_section_max, multistart_max, ordered_map

logger = logging.getLogger(__name__)

LambdaRule = Union[float, str]


@dataclass(frozen=True)
class NoiseBudget:
    """Kernel variances, feature scale and distance estimate of one setup."""

    sigma: float
    sigma_inf: float
    delta_w: float
    l_t: float
    l_12: float

    def __post_init__(self) -> None:
        if not self.delta_w > 0.0:
            raise DomainError(f"delta_W={self.delta_w!r} must be positive")
        if self.l_t < 0.0:
            raise DomainError(f"l_T={self.l_t!r} must be nonnegative")


@dataclass(frozen=True)
class AverageFidelitySpec:
    """Gaussian regularizer width and quadrature order of the average fidelity."""

    n_coh: float
    order: int = NumericsConfig.QUADRATURE_ORDER

    def __post_init__(self) -> None:
        if not self.n_coh > 0.0:
            raise DomainError(f"n_coh={self.n_coh!r} must be positive")
        if self.order < 2:
            raise DomainError(f"quadrature order {self.order!r} must be at least 2")


@dataclass(frozen=True)
class LambdaPoint:
    n_coh: float
    lam_opt: float
    fidelity: float


def fidelity_at(state: InputState, p: ChannelParams, lam: LambdaRule = "auto") -> float:
    """Closed-form fidelity for channel p at gain lam ("auto" for |T2/T1|)."""
    return teleport.fidelity_value(state, teleport.setting_for(p, lam))


def _lambda_upper(p: ChannelParams) -> float:
    if p.t1 == 0.0:
        return 2.0
    return max(2.0, 4.0 * p.t2 / p.t1)


def _maximize_gain(f: Callable[[float], float], p: ChannelParams) -> Tuple[float, float]:
    """
    Multistart search over the gain bracket, checked against |T2/T1|.

    At large |zeta| the peak around lambda* = |T2/T1| is only ~e^{-|zeta|}
    wide, far below the bracket-wide tolerance. lambda* itself and a search
    on that scale around it are kept as candidates.
    """
    upper = _lambda_upper(p)
    candidates = [multistart_max(f, NumericsConfig.LAMBDA_FLOOR, upper)]
    try:
        star = channel.lambda_star(p)
    except DomainError:
        return candidates[0]
    if NumericsConfig.LAMBDA_FLOOR <= star <= upper:
        width = 8.0 * (1.0 + star) * math.exp(-p.zeta_mag) / p.t1
        lo, hi = max(NumericsConfig.LAMBDA_FLOOR, star - width), min(upper, star + width)
        tol = max(NumericsConfig.GOLDEN_TOL * (hi - lo), 4.0 * sys.float_info.epsilon * star)
        candidates.append((star, f(star)))
        candidates.append(golden_section_max(f, lo, hi, tol))
    return max(candidates, key=lambda c: c[1])


def optimize_lambda(state: InputState, p: ChannelParams) -> Tuple[float, float]:
    """
    Gain maximizing the fidelity on [1e-4, max(2, 4|T2/T1|)].

    Returns:
        (lambda_opt, F_max)
    """
    lam, best = _maximize_gain(lambda x: fidelity_at(state, p, x), p)
    logger.debug(f"optimize_lambda: zeta={p.zeta_mag}, lambda_opt={lam}, F={best}")
    return lam, best


def _gain(state: InputState, p: ChannelParams, rule: LambdaRule) -> float:
    if rule == "optimal":
        return optimize_lambda(state, p)[0]
    if rule == "star":
        return channel.lambda_star(p)
    if rule == "dotted":
        return channel.lambda_dotted(p)
    if rule == "one":
        return 1.0
    return float(rule)


def fidelity_vs_squeezing(
    state: InputState,
    p: ChannelParams,
    zetas: Sequence[float],
    rule: LambdaRule = "star",
) -> List[Tuple[float, float, float]]:
    """
    (zeta, lambda, F) along a squeezing sweep.

    rule is a number or one of "optimal", "star" (|T2/T1|), "dotted" (C2/|S|)
    and "one". Points where the rule is undefined yield NaN.
    """

    def point(zeta: float) -> Tuple[float, float, float]:
        q = p.with_squeezing(zeta)
        try:
            lam = _gain(state, q, rule)
        except DomainError:
            return zeta, math.nan, math.nan
        return zeta, lam, fidelity_at(state, q, lam)

    return ordered_map(point, zetas)


# Average fidelity over coherent amplitudes

def fidelity_surface(zeta0: float, setting: teleport.TeleportSetting) -> Callable[[np.ndarray], np.ndarray]:
    """F as a vectorized function of the coherent amplitude alpha0."""
    teleport._require_zero_phase(setting)
    return lambda alpha0: teleport._squeezed_fidelity(zeta0, alpha0, setting.sigma, setting.lam)


def _log_curvature(f: Callable[[np.ndarray], np.ndarray], direction: complex, step: float = 1e-3) -> float:
    values = f(np.array([0j, step * direction, -step * direction]))
    centre, ahead, behind = np.log(values)
    return max(0.0, float(2.0 * centre - ahead - behind) / (step * step))


def _hermite_average(f: Callable[[np.ndarray], np.ndarray], n_coh: float, order: int, kx: float, ky: float) -> float:
    t, w = hermgauss(order)
    sx = 1.0 / math.sqrt(1.0 + kx * n_coh)
    sy = 1.0 / math.sqrt(1.0 + ky * n_coh)
    root = math.sqrt(n_coh)
    wx = w * np.exp(t * t * (1.0 - sx * sx))
    wy = w * np.exp(t * t * (1.0 - sy * sy))
    re, im = np.meshgrid(root * sx * t, root * sy * t)
    values = f(re + 1j * im)
    return sx * sy * float(wy @ values @ wx) / math.pi


def average_fidelity(spec: AverageFidelitySpec, p: ChannelParams, lam: float, zeta0: float = 0.0) -> float:
    """
    Fidelity averaged over alpha0 with weight exp(-|alpha0|^2/n_coh)/(pi n_coh).

    Tensor Gauss-Hermite quadrature, rescaled by the curvature of log F at the
    origin so the integrand is flat for Gaussian F.

    Raises:
        QuadratureError: If orders m and 1.5 m disagree beyond the relative tolerance.
    """
    f = fidelity_surface(zeta0, teleport.setting_for(p, lam))
    kx = _log_curvature(f, 1.0 + 0j)
    ky = _log_curvature(f, 1j)
    coarse = _hermite_average(f, spec.n_coh, spec.order, kx, ky)
    fine = _hermite_average(f, spec.n_coh, int(math.ceil(1.5 * spec.order)), kx, ky)
    if abs(fine - coarse) > NumericsConfig.QUADRATURE_RTOL * max(abs(fine), 1e-300):
        raise QuadratureError(
            f"average fidelity not converged at order {spec.order}: {coarse!r} vs {fine!r}"
        )
    return fine


def average_fidelity_closed_form(spec: AverageFidelitySpec, p: ChannelParams, lam: float, zeta0: float = 0.0) -> float:
    """Analytic average: F0 / sqrt((1 + a n)(1 + b n))."""
    s = teleport.setting_for(p, lam)
    f0 = teleport.fidelity_value(GaussianInput(zeta0, 0j), s)
    a, b = teleport.amplitude_rates(zeta0, s.sigma, s.lam)
    return f0 / math.sqrt((1.0 + a * spec.n_coh) * (1.0 + b * spec.n_coh))


def optimal_lambda_for_average(
    spec: AverageFidelitySpec, p: ChannelParams, zeta0: float = 0.0
) -> Tuple[float, float]:
    """Gain maximizing the average fidelity."""
    return _maximize_gain(lambda lam: average_fidelity(spec, p, lam, zeta0), p)


def optimal_lambda_vs_ncoh(
    p: ChannelParams,
    zeta0: float,
    n_coh_values: Sequence[float],
    order: int = NumericsConfig.QUADRATURE_ORDER,
) -> List[LambdaPoint]:
    """argmax_lambda of the average fidelity for each cutoff n_coh."""

    def point(n_coh: float) -> LambdaPoint:
        lam, value = optimal_lambda_for_average(AverageFidelitySpec(n_coh=n_coh, order=order), p, zeta0)
        return LambdaPoint(n_coh=n_coh, lam_opt=lam, fidelity=value)

    logger.info(f"Optimal gain vs n_coh at zeta={p.zeta_mag}: {len(n_coh_values)} points")
    return ordered_map(point, n_coh_values)


# Source placement and long distances

def _placed_channel(l1: float, l12: float, lA: float, zeta_mag: float) -> ChannelParams:
    return channel.from_lengths(l1, max(l12 - l1, 0.0), lA, lA, zeta_mag=zeta_mag)


def source_position_profile(
    state: InputState, l12: float, lA: float = 1.0, zeta_mag: float = NumericsConfig.INFINITE_SQUEEZING, count: int = 51
) -> List[Tuple[float, float]]:
    """(l1, F) across source positions with lambda = exp((l1 - l2)/lA)."""
    positions = np.linspace(0.0, l12, count)
    return [(float(l1), fidelity_at(state, _placed_channel(l1, l12, lA, zeta_mag))) for l1 in positions]


def optimize_source_position(
    state: InputState, l12: float, lA: float = 1.0, zeta_mag: float = NumericsConfig.INFINITE_SQUEEZING
) -> Tuple[float, float]:
    """
    Source distance from Alice maximizing the fidelity at fixed l12.

    Returns:
        (l1_opt, F_max)
    """
    if l12 < 0.0 or not lA > 0.0:
        raise DomainError(f"need l12 >= 0 and lA > 0, got l12={l12!r}, lA={lA!r}")
    if l12 == 0.0:
        return 0.0, fidelity_at(state, _placed_channel(0.0, 0.0, lA, zeta_mag))
    return golden_section_max(
        lambda l1: fidelity_at(state, _placed_channel(l1, l12, lA, zeta_mag)),
        0.0,
        l12,
        tol=NumericsConfig.GOLDEN_TOL * max(1.0, l12),
    )


def fidelity_vs_length(
    state: InputState,
    l2_values: Sequence[float],
    lA: float = 1.0,
    zeta_mag: float = NumericsConfig.INFINITE_SQUEEZING,
) -> List[Tuple[float, float]]:
    """(l2, F) with the source at Alice and lambda = exp(-l2/lA)."""
    return ordered_map(
        lambda l2: (l2, fidelity_at(state, channel.from_lengths(0.0, l2, lA, lA, zeta_mag=zeta_mag))),
        l2_values,
    )


def classical_level(state: InputState, p: ChannelParams, lam: LambdaRule = "auto") -> float:
    """Fidelity of the same arms and gain with no entanglement."""
    q = p.with_squeezing(0.0)
    gain = channel.lambda_star(q) if lam == "auto" else float(lam)
    return fidelity_at(state, q, gain)


def feature_scale(state: InputState) -> float:
    """delta_W: e^{-|zeta0|} for squeezed states, N^{-1/2} for number states (1 for vacuum)."""
    if isinstance(state, FockInput):
        return 1.0 if state.n == 0 else 1.0 / math.sqrt(state.n)
    return math.exp(-abs(state.zeta0))


def max_distance(state: InputState, margin: Optional[float] = None, lA: float = 1.0) -> float:
    """
    Largest arm length with sigma_inf = margin * delta_W^2 for symmetric arms.

    With |T1| = |T2| = exp(-l/lA), sigma_inf = (1 - |T|^2)/2, so
    l = -(lA/2) ln(1 - 2 margin delta_W^2); infinite when the bracket is not positive.

    Raises:
        DomainError: If margin is outside (0, 1).
    """
    margin = NumericsConfig.DISTANCE_MARGIN if margin is None else margin
    if not 0.0 < margin < 1.0:
        raise DomainError(f"margin={margin!r} must lie in (0, 1)")
    q = 2.0 * margin * feature_scale(state) ** 2
    if q >= 1.0:
        return math.inf
    return -0.5 * lA * math.log1p(-q)


def noise_budget(
    state: InputState, p: ChannelParams, lam: LambdaRule = "auto", margin: Optional[float] = None
) -> NoiseBudget:
    """Noise figures of channel p next to the state's distance estimate."""
    gain = channel.lambda_star(p) if lam == "auto" else float(lam)
    l1, l2 = p.lengths()
    return NoiseBudget(
        sigma=channel.sigma(p, gain),
        sigma_inf=channel.sigma_infinity(p),
        delta_w=feature_scale(state),
        l_t=max_distance(state, margin, lA=p.lA1),
        l_12=l1 + l2,
    )
