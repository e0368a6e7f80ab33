"""Exception hierarchy shared by the numeric core, the oracle and the CLI."""

from __future__ import annotations


class TeleportError(Exception):
    """Base class for all calculator errors."""
    pass


class DomainError(TeleportError, ValueError):
    """Custom exception for parameters outside a formula's domain."""
    pass


class GridResolutionError(TeleportError):
    """Custom exception for grids too coarse or too small for the requested state."""
    pass


class GridMismatchError(TeleportError):
    """Custom exception for operations on incompatible grids."""
    pass


class QuadratureError(TeleportError):
    """Custom exception for averaging quadratures that miss their tolerance."""
    pass


class SeedRequired(TeleportError):
    """Custom exception for Monte-Carlo runs started without a seed."""
    pass


class ConfigurationError(TeleportError):
    """Custom exception for configuration errors."""
    pass
