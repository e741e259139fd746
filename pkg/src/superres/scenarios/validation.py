"""
Static checks of a scenario configuration before anything is computed
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Any, List

from ..core.config import ScenarioConfig
from ..core.errors import SuperresError
from ..core.model import XY8_BLOCK, superresolution_offset

logger = logging.getLogger(__name__)

ERROR = 'error'
WARNING = 'warning'
SUPERRESOLUTION_PHASE_TOLERANCE = 1e-3
KNOWN_SECTIONS = set(ScenarioConfig.DEFAULT_CONFIG)


@dataclass(frozen=True)
class Diagnostic:
    level: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.field}: {self.message}"


def _positive(document: Dict[str, Any], section: str, key: str,
              diagnostics: List[Diagnostic], allow_zero: bool = False):
    value = (document.get(section) or {}).get(key)
    if value is None:
        return
    try:
        number = float(value)
    except (TypeError, ValueError):
        diagnostics.append(Diagnostic(ERROR, f'{section}.{key}', f'not a number: {value!r}'))
        return
    if not math.isfinite(number) or number < 0 or (number == 0 and not allow_zero):
        bound = 'non-negative' if allow_zero else 'positive'
        diagnostics.append(Diagnostic(ERROR, f'{section}.{key}', f'must be {bound}, got {value}'))


def _whole(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return isinstance(value, float) and value.is_integer()


def validate(config: ScenarioConfig) -> List[Diagnostic]:
    """Errors make a scenario unrunnable; warnings flag physically questionable setups"""
    document = config.config
    diagnostics: List[Diagnostic] = []

    for section in sorted(set(document) - KNOWN_SECTIONS):
        diagnostics.append(Diagnostic(WARNING, section, 'unknown section is ignored'))

    for key in ('frequency_1_hz', 'frequency_2_hz'):
        _positive(document, 'signal', key, diagnostics)
    for key in ('amplitude_1_hz', 'amplitude_2_hz'):
        _positive(document, 'signal', key, diagnostics, allow_zero=True)
    _positive(document, 'dd', 'pulse_spacing_s', diagnostics)
    _positive(document, 'protocol', 'total_time_s', diagnostics)
    _positive(document, 'protocol', 'decay_rate_per_s', diagnostics, allow_zero=True)
    _positive(document, 'protocol', 'n_exp', diagnostics)

    count = config.get('dd.pulse_count')
    if document.get('dd') and count is not None:
        if not _whole(count) or count < 1:
            diagnostics.append(Diagnostic(ERROR, 'dd.pulse_count',
                                          f'must be a positive integer, got {count!r}'))
        elif int(count) % XY8_BLOCK:
            diagnostics.append(Diagnostic(WARNING, 'dd.pulse_count',
                                          f'{int(count)} is not a whole number of XY8 blocks'))
    if any(d.level == ERROR for d in diagnostics):
        return diagnostics

    try:
        config.constants()
        effective = config.effective()
    except SuperresError as exc:
        section = 'effective' if document.get('effective') else 'protocol'
        diagnostics.append(Diagnostic(ERROR, section, str(exc)))
        return diagnostics

    if any(effective.small_detuning):
        diagnostics.append(Diagnostic(WARNING, 'dd.pulse_spacing_s',
                                      'tone within 0.1% of the pulse-train frequency'))
    if effective.delta_s == 0:
        diagnostics.append(Diagnostic(WARNING, 'signal', 'delta_s = 0, no superresolution time'))
    else:
        t = config.total_time
        _, offset = superresolution_offset(effective.delta_s, t)
        if abs(offset) > SUPERRESOLUTION_PHASE_TOLERANCE:
            phase = abs(effective.delta_s) * t / math.pi
            diagnostics.append(Diagnostic(WARNING, 'protocol.total_time_s',
                                          f'off superresolution (δ_s t = {phase:.3g}π)'))
    for diagnostic in diagnostics:
        logger.debug("%s", diagnostic)
    return diagnostics


def has_errors(diagnostics: List[Diagnostic], strict: bool = False) -> bool:
    levels = (ERROR, WARNING) if strict else (ERROR,)
    return any(d.level in levels for d in diagnostics)
