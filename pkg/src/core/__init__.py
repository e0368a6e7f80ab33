"""Closed-form layer: Gaussian algebra, lossy channel, teleportation and measurement."""

from .gaussian_core import (
    GaussianWigner,
    evaluate,
    gaussian_overlap,
    make_gaussian,
    teleport_map,
)
from .channel import ChannelParams, EntangledState, from_lengths, shared_state
from .teleport import (
    FidelityReport,
    FockInput,
    GaussianInput,
    InputState,
    TeleportSetting,
    fidelity,
    setting_for,
)

__all__ = [
    "GaussianWigner",
    "evaluate",
    "gaussian_overlap",
    "make_gaussian",
    "teleport_map",
    "ChannelParams",
    "EntangledState",
    "from_lengths",
    "shared_state",
    "FidelityReport",
    "FockInput",
    "GaussianInput",
    "InputState",
    "TeleportSetting",
    "fidelity",
    "setting_for",
]
