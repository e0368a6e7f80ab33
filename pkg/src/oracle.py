"""
Brute-force phase-space numerics used to certify the closed forms.

Wigner functions are sampled on a square grid over [-L, L]^2 with n points
per axis (n a power of two). Integrals use the trapezoid rule, the averaged
teleportation map is a zero-padded FFT convolution with a sampled Gaussian
kernel followed by a spline resample at beta/lambda, and the fidelity is the
grid overlap pi * sum(W_in W_out) dx dy.
"""

from __future__ import annotations

import cmath
import math
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy import integrate, ndimage, signal, special

from .config import OracleConfig
from .core.gaussian_core import GaussianWigner, evaluate, to_moments
from .core.teleport import FockInput, GaussianInput, InputState
from .errors import DomainError, GridMismatchError, GridResolutionError
from .utils import is_power_of_two, next_power_of_two

logger = logging.getLogger(__name__)

Rasterizable = Union[InputState, GaussianWigner]


@dataclass(frozen=True)
class GridWigner:
    """Wigner function sampled on [-L, L]^2; values[i_y, i_x]."""

    half_width: float
    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.half_width > 0.0:
            raise DomainError(f"half-width L={self.half_width!r} must be positive")
        if not is_power_of_two(self.n):
            raise DomainError(f"grid size n={self.n!r} must be a power of two")
        if self.values.shape != (self.n, self.n):
            raise DomainError(f"values shape {self.values.shape} does not match n={self.n}")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    def plane(self) -> np.ndarray:
        """Complex coordinates gamma = x + iy matching values."""
        x = self.axis
        return x[np.newaxis, :] + 1j * x[:, np.newaxis]


def _integrate(values: np.ndarray, axis: np.ndarray) -> float:
    return float(integrate.trapezoid(integrate.trapezoid(values, axis, axis=1), axis))


def mass(g: GridWigner) -> float:
    """Trapezoid integral of the sampled function over the window."""
    return _integrate(g.values, g.axis)


def minimum(g: GridWigner) -> float:
    return float(g.values.min())


def sup_distance(g1: GridWigner, g2: GridWigner) -> float:
    _check_same_grid(g1, g2)
    return float(np.max(np.abs(g1.values - g2.values)))


def _check_same_grid(g1: GridWigner, g2: GridWigner) -> None:
    if g1.n != g2.n or not math.isclose(g1.half_width, g2.half_width, rel_tol=1e-12):
        raise GridMismatchError(
            f"grids differ: (L={g1.half_width}, n={g1.n}) vs (L={g2.half_width}, n={g2.n})"
        )


# State geometry

@dataclass(frozen=True)
class Extent:
    """Where a state lives and how fine its structure is."""

    reach: float  # radius outside which the state is negligible
    feature: float  # smallest length scale to resolve


def state_extent(state: Rasterizable) -> Extent:
    tail = OracleConfig.TAIL_WIDTHS
    if isinstance(state, FockInput):
        n = state.n
        feature = min(0.5, math.pi / (4.0 * math.sqrt(4.0 * n + 2.0)))
        return Extent(reach=math.sqrt(n + 1.0) + 2.5, feature=feature)
    g = state.wigner() if isinstance(state, GaussianInput) else state
    mean, cov = to_moments(g)
    eig = np.linalg.eigvalsh(cov)
    return Extent(reach=abs(mean) + tail * math.sqrt(eig[-1]), feature=math.sqrt(eig[0]))


def check_grid(state: Rasterizable, half_width: float, n: int) -> None:
    """
    Raise GridResolutionError when (L, n) cannot represent state.
    """
    if n < OracleConfig.MIN_GRID_N:
        raise GridResolutionError(f"n={n} is below the minimum grid size {OracleConfig.MIN_GRID_N}")
    ext = state_extent(state)
    h = 2.0 * half_width / (n - 1)
    if half_width < ext.reach:
        raise GridResolutionError(f"half-width L={half_width} is smaller than the state's reach {ext.reach:.4g}")
    if h > OracleConfig.FEATURE_SPACING * ext.feature:
        raise GridResolutionError(
            f"grid spacing {h:.4g} (L={half_width}, n={n}) does not resolve feature scale {ext.feature:.4g}"
        )


def grid_for(state: Rasterizable, sigma: float = 0.0, lam: float = 1.0) -> Tuple[float, int]:
    """
    Smallest admissible power-of-two grid for the input and its teleported output.

    Raises:
        GridResolutionError: If the required n exceeds the configured maximum.
    """
    ext = state_extent(state)
    root_sigma = math.sqrt(max(sigma, 0.0))
    reach = max(OracleConfig.HALF_WIDTH, ext.reach, lam * (ext.reach + OracleConfig.TAIL_WIDTHS * root_sigma))
    reach = math.ceil(2.0 * reach) / 2.0
    spacing = OracleConfig.FEATURE_SPACING * min(ext.feature, lam * math.sqrt(ext.feature ** 2 + sigma))
    if sigma > 0.0:
        spacing = min(spacing, root_sigma / OracleConfig.KERNEL_SPACINGS)
    n = max(OracleConfig.GRID_N, next_power_of_two(int(math.ceil(2.0 * reach / spacing)) + 1))
    if n > OracleConfig.MAX_GRID_N:
        raise GridResolutionError(
            f"state needs n={n} points per axis on L={reach}, above the limit {OracleConfig.MAX_GRID_N}"
        )
    logger.debug(f"Grid for {state}: L={reach}, n={n}")
    return reach, n


# Rasterization

def wigner_function(state: Rasterizable) -> Callable[[np.ndarray], np.ndarray]:
    """Pointwise Wigner function of an input state or Gaussian."""
    if isinstance(state, FockInput):
        n = state.n
        sign = -1.0 if n % 2 else 1.0

        def fock(gamma):
            r2 = np.abs(gamma) ** 2
            return sign * 2.0 / math.pi * np.exp(-2.0 * r2) * special.eval_laguerre(n, 4.0 * r2)

        return fock
    g = state.wigner() if isinstance(state, GaussianInput) else state
    return lambda gamma: evaluate(g, gamma)


def rasterize(state: Rasterizable, half_width: float, n: int, check: bool = True) -> GridWigner:
    """
    Sample a state's Wigner function on [-L, L]^2.

    Raises:
        DomainError: If n is not a power of two or L <= 0.
        GridResolutionError: If check is set and the grid cannot represent the
            state, or the sampled mass of a normalized state is off by more
            than OracleConfig.TOL_MASS.
    """
    if not half_width > 0.0:
        raise DomainError(f"half-width L={half_width!r} must be positive")
    if not is_power_of_two(n):
        raise DomainError(f"grid size n={n!r} must be a power of two")
    if check:
        check_grid(state, half_width, n)
    axis = np.linspace(-half_width, half_width, n)
    gamma = axis[np.newaxis, :] + 1j * axis[:, np.newaxis]
    values = np.asarray(wigner_function(state)(gamma), dtype=float)
    g = GridWigner(half_width=half_width, n=n, values=values)
    if check and (not isinstance(state, GaussianWigner) or state.is_normalized()):
        m = mass(g)
        if abs(m - 1.0) > OracleConfig.TOL_MASS:
            raise GridResolutionError(
                f"sampled mass {m:.6g} on (L={half_width}, n={n}) is not within {OracleConfig.TOL_MASS} of 1"
            )
    return g


def _resample(values: np.ndarray, half_width: float, n: int, lam: float, phi_tilde: float) -> np.ndarray:
    """values(e^{-i phi} beta / lam) / lam^2 on the same grid."""
    axis = np.linspace(-half_width, half_width, n)
    beta = axis[np.newaxis, :] + 1j * axis[:, np.newaxis]
    source = beta * cmath.exp(-1j * phi_tilde) / lam
    h = 2.0 * half_width / (n - 1)
    coords = np.array([(source.imag + half_width) / h, (source.real + half_width) / h])
    sampled = ndimage.map_coordinates(values, coords, order=3, mode="constant", cval=0.0)
    return sampled / (lam * lam)


def convolve_teleport(g: GridWigner, sigma: float, lam: float, phi_tilde: float = 0.0) -> GridWigner:
    """
    Averaged teleported state on the same grid.

    Raises:
        GridResolutionError: If sqrt(sigma) is below two grid spacings.
        DomainError: If sigma <= 0 or lam <= 0.
    """
    if not sigma > 0.0 or not lam > 0.0:
        raise DomainError(f"need sigma > 0 and lambda > 0, got sigma={sigma!r}, lambda={lam!r}")
    h = g.spacing
    if math.sqrt(sigma) < OracleConfig.KERNEL_SPACINGS * h:
        raise GridResolutionError(
            f"kernel sqrt(sigma)={math.sqrt(sigma):.4g} is under-resolved by grid spacing {h:.4g}"
        )
    half = min(g.n - 1, int(math.ceil(OracleConfig.TAIL_WIDTHS * math.sqrt(sigma) / h)))
    offsets = h * np.arange(-half, half + 1)
    kernel_1d = np.exp(-offsets ** 2 / (2.0 * sigma)) * h / math.sqrt(2.0 * math.pi * sigma)
    kernel = np.outer(kernel_1d, kernel_1d)
    smeared = signal.fftconvolve(g.values, kernel, mode="same")
    if lam != 1.0 or phi_tilde:
        smeared = _resample(smeared, g.half_width, g.n, lam, phi_tilde)
    return GridWigner(half_width=g.half_width, n=g.n, values=smeared)


def overlap(g1: GridWigner, g2: GridWigner) -> float:
    """
    pi * integral(W1 W2) by the trapezoid rule.

    Raises:
        GridMismatchError: If the grids differ.
    """
    _check_same_grid(g1, g2)
    return math.pi * _integrate(g1.values * g2.values, g1.axis)


def teleported_grid(
    state: InputState,
    sigma: float,
    lam: float,
    half_width: float,
    n: int,
    phi_tilde: float = 0.0,
) -> Tuple[GridWigner, GridWigner]:
    """Input grid and its teleported output; sigma below 1e-9 is the pure rescale."""
    g_in = rasterize(state, half_width, n)
    if sigma < 1e-9:
        scaled = wigner_function(state)(g_in.plane() * cmath.exp(-1j * phi_tilde) / lam) / (lam * lam)
        return g_in, GridWigner(half_width=half_width, n=n, values=np.asarray(scaled, dtype=float))
    return g_in, convolve_teleport(g_in, sigma, lam, phi_tilde)


def fidelity_on_grid(
    state: InputState,
    sigma: float,
    lam: float,
    grid: Optional[Tuple[float, int]] = None,
    phi_tilde: float = 0.0,
) -> float:
    """Overlap of the rasterized input with its grid-convolved output."""
    half_width, n = grid if grid is not None else grid_for(state, sigma, lam)
    g_in, g_out = teleported_grid(state, sigma, lam, half_width, n, phi_tilde)
    return overlap(g_in, g_out)


def convergence_delta(state: InputState, sigma: float, lam: float) -> float:
    """Change of the grid fidelity when n is doubled on the automatic window."""
    half_width, n = grid_for(state, sigma, lam)
    coarse = fidelity_on_grid(state, sigma, lam, grid=(half_width, n))
    fine = fidelity_on_grid(state, sigma, lam, grid=(half_width, 2 * n))
    return abs(fine - coarse)


# Debug dumps: header (L, n) then row-major values

def dump_csv(g: GridWigner, path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(f"{g.half_width!r},{g.n}\n")
        np.savetxt(handle, g.values, delimiter=",", fmt="%.17g")
    return path


def load_csv(path: Union[str, Path]) -> GridWigner:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        values = np.loadtxt(handle, delimiter=",", ndmin=2)
    return GridWigner(half_width=float(header[0]), n=int(header[1]), values=values)


def dump_binary(g: GridWigner, path: Union[str, Path]) -> Path:
    path = Path(path)
    np.concatenate(([g.half_width, float(g.n)], g.values.ravel())).astype("<f8").tofile(path)
    return path


def load_binary(path: Union[str, Path]) -> GridWigner:
    raw = np.fromfile(Path(path), dtype="<f8")
    n = int(raw[1])
    return GridWigner(half_width=float(raw[0]), n=n, values=raw[2:].reshape(n, n))


# Consistency suite

class OracleCase(BaseModel):
    """One point of the closed-form / overlap / grid comparison."""

    label: str
    sigma: float
    lam: float
    closed_form: float
    overlap: Optional[float] = None
    grid: float
    delta_closed: float
    delta_grid: float
    passed: bool


class OracleSummary(BaseModel):
    cases: List[OracleCase]
    closed_tol: float
    grid_tol: float
    passed: bool


def default_cases() -> List[Tuple[InputState, float, float]]:
    """(state, sigma, lambda) points of the standard suite."""
    cases: List[Tuple[InputState, float, float]] = [
        (GaussianInput(0.0, 0j), 0.5, 1.0),
        (GaussianInput(0.5, 0j), 0.1, 0.9),
        (GaussianInput(0.0, 1.0 + 0j), 0.5, 0.5),
        (GaussianInput(0.88, 0.3 + 0.2j), 0.2, 0.8),
        (GaussianInput(1.2, 0.7 + 0j), 0.05, 1.3),
    ]
    for n in range(4):
        for sigma in (0.1, 0.5):
            for lam in (0.5, 1.0):
                cases.append((FockInput(n), sigma, lam))
    return cases


def run_consistency_suite(
    cases: Optional[List[Tuple[InputState, float, float]]] = None,
    grid_n: Optional[int] = None,
    perturb_sigma: float = 0.0,
    closed_tol: float = 1e-10,
    grid_tol: float = 1e-4,
    progress: Optional[Callable[[str], None]] = None,
) -> OracleSummary:
    """
    Compare closed forms, the Gaussian overlap route and the grid oracle.

    Args:
        cases: (state, sigma, lambda) points; the standard suite when omitted.
        grid_n: Force this many points per axis instead of automatic sizing.
        perturb_sigma: Added to sigma on the grid side only (negative control).
        closed_tol: Closed-form against overlap tolerance.
        grid_tol: Closed-form against grid tolerance.
        progress: Called with each case label.

    Raises:
        GridResolutionError: If a forced grid cannot represent a case.
    """
    from .core import teleport

    results: List[OracleCase] = []
    for state, sigma, lam in cases or default_cases():
        label = (
            f"fock N={state.n}" if isinstance(state, FockInput)
            else f"squeezed zeta0={state.zeta0} alpha0={state.alpha0}"
        )
        label = f"{label} sigma={sigma} lambda={lam}"
        setting = teleport.TeleportSetting(lam=lam, sigma=sigma)
        closed = teleport.fidelity_value(state, setting)
        via_overlap = teleport.fidelity_overlap(state, setting) if isinstance(state, GaussianInput) else None

        grid_sigma = sigma + perturb_sigma
        if grid_n is not None:
            half_width, _ = grid_for(state, grid_sigma, lam)
            grid = (half_width, grid_n)
        else:
            grid = grid_for(state, grid_sigma, lam)
        on_grid = fidelity_on_grid(state, grid_sigma, lam, grid=grid)

        delta_closed = abs(closed - via_overlap) if via_overlap is not None else 0.0
        delta_grid = abs(closed - on_grid)
        passed = delta_closed <= closed_tol and delta_grid <= grid_tol
        if not passed:
            logger.warning(f"Oracle case failed: {label} (closed={closed}, grid={on_grid}, delta={delta_grid:.3g})")
        results.append(
            OracleCase(
                label=label,
                sigma=sigma,
                lam=lam,
                closed_form=closed,
                overlap=via_overlap,
                grid=on_grid,
                delta_closed=delta_closed,
                delta_grid=delta_grid,
                passed=passed,
            )
        )
        if progress is not None:
            progress(label)

    summary = OracleSummary(
        cases=results, closed_tol=closed_tol, grid_tol=grid_tol, passed=all(c.passed for c in results)
    )
    logger.info(f"Oracle suite: {sum(c.passed for c in results)}/{len(results)} cases passed")
    return summary
