"""
Shared fixtures: the reference experiment in the frame of the pulse sequence
"""

from pathlib import Path

import pytest

from superres.core.model import EffectiveSignal
from superres.core.units import hz_to_rad

MANIFEST_DIR = Path(__file__).parent.parent / 'src' / 'superres' / 'data' / 'manifests'
CONFIG_DIR = MANIFEST_DIR / 'configs'

AMPLITUDE = hz_to_rad(16850.0)
DELTA_S = hz_to_rad(12500.0)
T_SR = 80e-6
N_EXP = 132000
DECAY_RATE = 1.0 / 1.3e-3


@pytest.fixture
def reference_eff():
    return EffectiveSignal.from_detunings(AMPLITUDE, DELTA_S, 0.0)


@pytest.fixture
def manifest_dir():
    return MANIFEST_DIR


@pytest.fixture
def config_dir():
    return CONFIG_DIR
