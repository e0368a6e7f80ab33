"""
Configuration module for the lossy-channel teleportation calculator.

This module manages numerical tolerances, grid defaults for the quadrature
oracle, figure defaults and general application settings. Every value can be
overridden from the environment or a ``.env`` file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, Any, List

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


class AppConfig:
    """Application-wide configuration settings."""

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE: str = os.getenv("CVTP_LOG_FILE", "")

    # Parallel sweeps
    THREADS: int = max(1, _env_int("CVTP_THREADS", os.cpu_count() or 1))

    # Output
    OUTPUT_DIGITS: int = 12
    DEFAULT_FORMAT: str = os.getenv("CVTP_FORMAT", "csv")

    @classmethod
    def validate_environment(cls) -> bool:
        """
        Validate the numeric environment overrides.

        Returns:
            True if every override parses and lies in range, False otherwise
        """
        problems: List[str] = []

        for name in ("CVTP_THREADS", "CVTP_N_MAX", "CVTP_GRID_N"):
            raw = os.getenv(name)
            if raw is None:
                continue
            try:
                if int(raw) < 1:
                    problems.append(f"{name} must be a positive integer (got {raw!r})")
            except ValueError:
                problems.append(f"{name} is not an integer (got {raw!r})")

        raw = os.getenv("CVTP_GRID_L")
        if raw is not None:
            try:
                if float(raw) <= 0:
                    problems.append(f"CVTP_GRID_L must be positive (got {raw!r})")
            except ValueError:
                problems.append(f"CVTP_GRID_L is not a number (got {raw!r})")

        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            problems.append(f"LOG_LEVEL {cls.LOG_LEVEL!r} is not a logging level")

        if problems:
            print("❌ Error: Invalid environment configuration:")
            for problem in problems:
                print(f"   - {problem}")
            return False

        return True


class NumericsConfig:
    """Tolerances and limits of the closed-form layer."""

    # Largest Fock number accepted by the polynomial recurrences
    N_MAX: int = _env_int("CVTP_N_MAX", 64)

    # Stand-in for |zeta| -> infinity
    INFINITE_SQUEEZING: float = 20.0

    CLOSED_FORM_TOL: float = 1e-10
    NORMALIZATION_TOL: float = 1e-12

    # Smallest sigma accepted as the identity limit
    IDENTITY_SIGMA: float = 1e-12

    # Scalar optimisation
    GOLDEN_TOL: float = 1e-6
    LAMBDA_FLOOR: float = 1e-4
    MULTISTART: int = 3

    # "much smaller than" factor of the high-fidelity condition
    DISTANCE_MARGIN: float = _env_float("CVTP_MARGIN", 0.1)

    # Average fidelity quadrature
    QUADRATURE_ORDER: int = 48
    QUADRATURE_RTOL: float = 1e-8


class OracleConfig:
    """Grid defaults of the brute-force phase-space oracle."""

    HALF_WIDTH: float = _env_float("CVTP_GRID_L", 6.0)
    GRID_N: int = _env_int("CVTP_GRID_N", 512)
    MIN_GRID_N: int = 256
    MAX_GRID_N: int = 4096
    TOL_MASS: float = 1e-4

    # Kernel must span at least this many grid spacings per standard deviation
    KERNEL_SPACINGS: float = 2.0
    # Grid spacing relative to the narrowest state feature
    FEATURE_SPACING: float = 0.8
    # Standard deviations kept inside the window
    TAIL_WIDTHS: float = 6.0


@dataclass
class FigureDefaults:
    """Caption parameters of one reproduced figure."""

    title: str
    x_label: str
    params: Dict[str, Any] = field(default_factory=dict)


class FigureConfig:
    """Defaults for the seven reproduced figures, read from their captions."""

    FIGURES: Dict[int, FigureDefaults] = {
        1: FigureDefaults(
            title="Fidelity vs TMSV squeezing, squeezed vacuum input",
            x_label="zeta",
            params={"zeta0": 0.5, "t1": 1.0, "t2": [1.0, 0.9, 0.6], "start": 0.0, "stop": 3.0, "count": 61},
        ),
        2: FigureDefaults(
            title="Fidelity vs TMSV squeezing for three displacement gains",
            x_label="zeta",
            params={"zeta0": 0.88, "fock_n": 1, "t1": 1.0, "t2": 0.9, "start": 0.05, "stop": 3.0, "count": 60},
        ),
        3: FigureDefaults(
            title="Optimum displacement gain vs cutoff coherent photon number",
            x_label="n_coh",
            params={"zeta0": 0.0, "t1": 1.0, "t2": 0.5, "zetas": [3.0, 3.3, 4.0], "start": 0.5, "stop": 100.0, "count": 25},
        ),
        4: FigureDefaults(
            title="Fidelity vs TMSV squeezing, squeezed coherent and number state",
            x_label="zeta",
            params={"zeta0": 0.5, "alpha0": 0.7, "fock_n": 1, "t1": 1.0, "t2": [1.0, 0.9, 0.6], "start": 0.0, "stop": 3.0, "count": 61},
        ),
        5: FigureDefaults(
            title="Infinite-squeezing fidelity vs transmission length",
            x_label="l2",
            params={"zeta0s": [0.88, 1.54, 1.87], "fock_ns": [1, 5, 10], "la": 1.0, "start": 0.0, "stop": 0.5, "count": 51},
        ),
        6: FigureDefaults(
            title="Classical levels of number states and their average",
            x_label="l2",
            params={"fock_ns": [0, 1, 2, 3], "la": 1.0, "start": 0.0, "stop": 3.0, "count": 61},
        ),
        7: FigureDefaults(
            title="Optimal source position vs Alice-Bob distance",
            x_label="l12",
            params={
                "squeezed": [[0.78, 0.5], [1.44, 1.0], [1.63, 2.0]],
                "fock_ns": [1, 5, 10],
                "la": 1.0,
                "start": 0.01,
                "stop": 0.5,
                "count": 50,
                "inset_l12": 0.1,
            },
        ),
    }
