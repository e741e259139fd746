"""
Core model, configuration and errors for superres
"""

from .errors import SuperresError, DomainError, ConfigError, FitError, AssertionFailure
from .units import AngularFrequency, hz_to_rad, rad_to_hz
from .model import (
    PhaseModel, TwoToneSignal, DdSequence, EffectiveSignal, ProtocolConfig,
    ExperimentConstants, effective_transform, ramsey_effective, scaling_factor,
    superresolution_times, superresolution_offset, xy8_rounding,
)

__all__ = [
    'SuperresError', 'DomainError', 'ConfigError', 'FitError', 'AssertionFailure',
    'AngularFrequency', 'hz_to_rad', 'rad_to_hz',
    'PhaseModel', 'TwoToneSignal', 'DdSequence', 'EffectiveSignal', 'ProtocolConfig',
    'ExperimentConstants', 'effective_transform', 'ramsey_effective', 'scaling_factor',
    'superresolution_times', 'superresolution_offset', 'xy8_rounding',
]
