"""
Single-mode Gaussian Wigner-function algebra.

A Gaussian Wigner function is held in the exponent form

    W(g) = (N/pi) exp(-A|g|^2 - B g*^2 - B* g^2 + C g* + C* g - D)

with g = x + iy and d^2g = dx dy. The vacuum has variance 1/4 per quadrature
(A = 2, B = C = D = 0, N = 2). Besides construction and evaluation this
module implements the averaged teleportation map (a Gaussian convolution
followed by a rescale of the output argument) and the phase-space overlap
pi * integral(W1 W2).
"""

from __future__ import annotations

import cmath
import math
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..config import NumericsConfig
from ..errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]


@dataclass(frozen=True)
class GaussianWigner:
    """Exponent-form coefficients of a single-mode Gaussian Wigner function."""

    A: float
    B: complex
    C: complex
    D: float
    N: float

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (self.A, self.D, self.N))) or not (
            cmath.isfinite(self.B) and cmath.isfinite(self.C)
        ):
            raise DomainError(f"non-finite Gaussian coefficients: {self}")
        if self.A <= 2.0 * abs(self.B):
            raise DomainError(f"A={self.A!r} must exceed 2|B|={2.0 * abs(self.B)!r}")
        if self.N <= 0.0:
            raise DomainError(f"prefactor N={self.N!r} must be positive")

    @property
    def determinant(self) -> float:
        """A^2 - 4|B|^2, the determinant of the quadratic form."""
        return self.A * self.A - 4.0 * abs(self.B) ** 2

    def is_normalized(self, tol: float = NumericsConfig.NORMALIZATION_TOL) -> bool:
        """True when N and D satisfy the normalization relations."""
        n_ref = math.sqrt(self.determinant)
        d_ref = _offset(self.A, self.B, self.C)
        return (
            abs(self.N - n_ref) <= tol * max(1.0, n_ref)
            and abs(self.D - d_ref) <= tol * max(1.0, abs(d_ref))
        )


def _offset(A: float, B: complex, C: complex) -> float:
    """Constant D making exp(...) peak at one: (A|C|^2 - 2 Re(B* C^2)) / (A^2 - 4|B|^2)."""
    det = A * A - 4.0 * abs(B) ** 2
    return (A * abs(C) ** 2 - 2.0 * (B.conjugate() * C * C).real) / det


def make_gaussian(A: float, B: complex, C: complex = 0j) -> GaussianWigner:
    """
    Build the normalized Gaussian with the given quadratic and linear coefficients.

    Args:
        A: Coefficient of |g|^2.
        B: Coefficient of g*^2.
        C: Linear coefficient.

    Raises:
        DomainError: If A <= 2|B|.
    """
    A = float(A)
    B = complex(B)
    C = complex(C)
    if A <= 2.0 * abs(B):
        raise DomainError(f"non-normalizable Gaussian: A={A!r} <= 2|B|={2.0 * abs(B)!r}")
    det = A * A - 4.0 * abs(B) ** 2
    return GaussianWigner(A=A, B=B, C=C, D=_offset(A, B, C), N=math.sqrt(det))


def vacuum() -> GaussianWigner:
    return make_gaussian(2.0, 0j, 0j)


def coherent(alpha0: complex) -> GaussianWigner:
    return make_gaussian(2.0, 0j, 2.0 * complex(alpha0))


def squeezed_coherent(zeta0: float, alpha0: complex = 0j) -> GaussianWigner:
    """Squeezed coherent state with real squeezing zeta0 and amplitude alpha0."""
    ch = math.cosh(2.0 * zeta0)
    sh = math.sinh(2.0 * zeta0)
    alpha0 = complex(alpha0)
    C = 2.0 * (alpha0 * ch + alpha0.conjugate() * sh)
    return make_gaussian(2.0 * ch, complex(sh), C)


def evaluate(g: GaussianWigner, gamma: ArrayLike) -> ArrayLike:
    """Value of the Wigner function at gamma (scalar or complex array)."""
    gamma = np.asarray(gamma, dtype=complex)
    gc = np.conj(gamma)
    exponent = (
        -g.A * (gamma * gc).real
        - 2.0 * (g.B * gc * gc).real
        + 2.0 * (g.C * gc).real
        - g.D
    )
    value = (g.N / math.pi) * np.exp(exponent)
    return float(value) if value.ndim == 0 else value


def teleport_map(g_in: GaussianWigner, sigma: float, lam: float) -> GaussianWigner:
    """
    Average teleported state for a Gaussian input.

    Convolves the input with a Gaussian kernel of variance sigma per
    quadrature and rescales the output argument by lam. The closed form is
    written in terms of x = 1/(2 sigma), which keeps the sigma -> 0 identity
    limit free of cancellation.

    Args:
        g_in: Input Gaussian.
        sigma: Kernel variance, > 0.
        lam: Displacement gain, > 0.

    Raises:
        DomainError: If sigma <= 0 or lam <= 0.
    """
    if not sigma > 0.0:
        raise DomainError(f"sigma={sigma!r} must be positive")
    if not lam > 0.0:
        raise DomainError(f"lambda={lam!r} must be positive")

    A, B, C = g_in.A, g_in.B, g_in.C
    x = 1.0 / (2.0 * sigma)
    Ax = A + x
    den = Ax * Ax - 4.0 * abs(B) ** 2
    lam2 = lam * lam

    A_out = x * (A * Ax - 4.0 * abs(B) ** 2) / (lam2 * den)
    B_out = x * x * B / (lam2 * den)
    C_out = x * (Ax * C - 2.0 * B * C.conjugate()) / (lam * den)
    N_out = x * g_in.N / (lam2 * math.sqrt(den))
    D_out = g_in.D - (Ax * abs(C) ** 2 - 2.0 * (B.conjugate() * C * C).real) / den

    return GaussianWigner(A=A_out, B=complex(B_out), C=complex(C_out), D=D_out, N=N_out)


def gaussian_overlap(g1: GaussianWigner, g2: GaussianWigner) -> float:
    """
    pi * integral(W1 W2) over the plane.

    Raises:
        DomainError: If the summed quadratic form is not positive definite.
    """
    A = g1.A + g2.A
    B = g1.B + g2.B
    C = g1.C + g2.C
    D = g1.D + g2.D
    det = A * A - 4.0 * abs(B) ** 2
    if det <= 0.0:
        raise DomainError(f"summed Gaussian is not normalizable: A^2-4|B|^2={det!r}")
    exponent = (A * abs(C) ** 2 - 2.0 * (B.conjugate() * C * C).real) / det - D
    return g1.N * g2.N / math.sqrt(det) * math.exp(exponent)


def rotate(g: GaussianWigner, theta: float) -> GaussianWigner:
    """Rotated state W'(b) = W(b e^{-i theta})."""
    phase = cmath.exp(1j * theta)
    return GaussianWigner(A=g.A, B=g.B * phase * phase, C=g.C * phase, D=g.D, N=g.N)


def to_moments(g: GaussianWigner) -> Tuple[complex, np.ndarray]:
    """Mean and covariance over (Re g, Im g) of a normalized Gaussian."""
    Q = np.array(
        [[g.A + 2.0 * g.B.real, 2.0 * g.B.imag], [2.0 * g.B.imag, g.A - 2.0 * g.B.real]]
    )
    mu = np.linalg.solve(Q, np.array([g.C.real, g.C.imag]))
    return complex(mu[0], mu[1]), 0.5 * np.linalg.inv(Q)


def from_moments(mean: complex, cov: np.ndarray) -> GaussianWigner:
    """
    Normalized Gaussian with the given mean and covariance.

    Raises:
        DomainError: If cov is not symmetric positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2) or not np.allclose(cov, cov.T, rtol=1e-12, atol=1e-15):
        raise DomainError(f"covariance must be a symmetric 2x2 matrix, got {cov.tolist()}")
    if np.linalg.det(cov) <= 0.0 or cov[0, 0] <= 0.0:
        raise DomainError(f"covariance is not positive definite: {cov.tolist()}")
    Q = 0.5 * np.linalg.inv(cov)
    A = 0.5 * (Q[0, 0] + Q[1, 1])
    B = complex(0.25 * (Q[0, 0] - Q[1, 1]), 0.5 * Q[0, 1])
    mean = complex(mean)
    c = Q @ np.array([mean.real, mean.imag])
    return make_gaussian(A, B, complex(c[0], c[1]))


def mean_photon_number(g: GaussianWigner) -> float:
    """<a^dagger a> = |mean|^2 + trace(cov) - 1/2."""
    mean, cov = to_moments(g)
    return abs(mean) ** 2 + float(np.trace(cov)) - 0.5
