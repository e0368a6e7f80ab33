import sys
import os
import pytest

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.channel import ChannelParams
from src.core.teleport import FockInput, GaussianInput


@pytest.fixture
def squeezed_vacuum():
    """Squeezed vacuum with mean photon number close to one."""
    return GaussianInput(0.88)


@pytest.fixture
def single_photon():
    return FockInput(1)


@pytest.fixture
def lossless_channel():
    """Perfect arms, moderate squeezing."""
    return ChannelParams(zeta_mag=1.0)


@pytest.fixture
def lossy_channel():
    """Ideal Alice arm, 10% amplitude loss on Bob's arm."""
    return ChannelParams(zeta_mag=1.0, T1=1.0, T2=0.9)


@pytest.fixture
def noisy_channel():
    """Complex transmissions, reservoir coupling and thermal photons on both arms."""
    return ChannelParams(
        zeta_mag=0.7, phi=0.3, T1=0.8 * complex(0.6, 0.8), T2=0.7, R1=0.3, R2=0.5, nth1=0.2, nth2=0.4
    )
