"""
Scenario configuration for superres
Hz and seconds on disk, rad/s in the domain objects built from it
"""

import copy
import json
from pathlib import Path
from typing import Dict, Any, Optional

import yaml

from .errors import ConfigError
from .model import (
    DdSequence, EffectiveSignal, ExperimentConstants, PhaseModel, ProtocolConfig, TwoToneSignal,
)
from .units import hz_to_rad

SCHEMA_VERSION = 1


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base"""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_document(path: Path) -> Dict[str, Any]:
    """Load a JSON or YAML document"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"Cannot read {path}: {exc}") from exc
    try:
        if Path(path).suffix.lower() in ('.yaml', '.yml'):
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot parse {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return document


class ScenarioConfig:
    """Manage one scenario's physical parameters"""

    DEFAULT_CONFIG = {
        'schema_version': SCHEMA_VERSION,
        'signal': {
            'amplitude_1_hz': 26468.0,
            'amplitude_2_hz': 26468.0,
            'frequency_1_hz': 2.5125e6,
            'frequency_2_hz': 2.5125e6,
            'phase_model': 'independent_uniform',
        },
        'dd': {
            'pulse_spacing_s': 200e-9,
            'pulse_count': 400,
        },
        'protocol': {
            'total_time_s': 80e-6,
            'decay_rate_per_s': 0.0,
            'n_exp': 132000,
        },
        # Effective-frame parameters; when set they replace the DD transform
        'effective': None,
        'constants': {},
        'readout': {
            'ssr': {
                'mu_bright': 0.26, 'mu_dark': 0.18, 'readouts': 700,
                'f0': 0.70, 'f_pi': 0.10, 'fidelity': 0.9969, 'repetitions': 4400,
            },
            'standard': {'c_bright': 1.03, 'c_dark': 0.73, 'n_bar': 0.25, 'n_sweep': 2e5},
            'trace': {
                'photons_bright': 0.30, 'photons_dark': 0.17, 'readouts': 700,
                'excess_noise': 0.0678, 'shot_time_s': 20.0 / 4400,
                'lifetime_up_s': 60e-3, 'lifetime_down_s': 60e-3,
            },
        },
        'pulse': {
            'duration_s': None,
            'detuning_std_hz': None,
            'amplitude_std': None,
        },
        'estimation': {
            'd_delta_s_hz': 77.0,
            'd_amplitude_hz': 100.0,
        },
    }

    def __init__(self, document: Optional[Dict[str, Any]] = None,
                 config_path: Optional[Path] = None):
        """Initialize from a document, a file, or defaults"""
        self.config_path = config_path
        if document is None and config_path is not None:
            document = read_document(config_path)
        self.config = deep_merge(self.DEFAULT_CONFIG, document or {})
        version = self.config.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported schema_version {version!r}")

    @classmethod
    def load(cls, path: Path) -> 'ScenarioConfig':
        return cls(config_path=Path(path))

    def save(self, path: Optional[Path] = None):
        """Save current configuration as JSON, or YAML for .yaml/.yml paths"""
        path = Path(path or self.config_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix.lower() in ('.yaml', '.yml'):
            path.write_text(yaml.safe_dump(self.config, sort_keys=False), encoding='utf-8')
        else:
            path.write_text(json.dumps(self.config, indent=2) + '\n', encoding='utf-8')

    def get(self, key: str, default: Any = None) -> Any:
        """Get a value by dotted key, e.g. 'protocol.total_time_s'"""
        node: Any = self.config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return default if node is None else node

    def set(self, key: str, value: Any):
        """Set a value by dotted key"""
        parts = key.split('.')
        node = self.config
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value

    def update(self, updates: Dict[str, Any]):
        """Deep-merge several values"""
        self.config = deep_merge(self.config, updates)

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config)

    def _number(self, key: str) -> float:
        value = self.get(key)
        if value is None:
            raise ConfigError(f"Missing value for {key}")
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be a number, got {value!r}") from exc

    def signal(self) -> TwoToneSignal:
        return TwoToneSignal.from_hz(
            self._number('signal.amplitude_1_hz'),
            self._number('signal.amplitude_2_hz'),
            self._number('signal.frequency_1_hz'),
            self._number('signal.frequency_2_hz'),
            PhaseModel.from_config(self.get('signal.phase_model')),
        )

    def dd(self) -> Optional[DdSequence]:
        if self.config.get('dd') is None:
            return None
        count = self.get('dd.pulse_count')
        if count is None:
            return None
        if isinstance(count, bool) or not isinstance(count, (int, float)) \
                or not float(count).is_integer():
            raise ConfigError(f"dd.pulse_count must be an integer, got {count!r}")
        return DdSequence(self._number('dd.pulse_spacing_s'), int(count))

    @property
    def total_time(self) -> float:
        return self._number('protocol.total_time_s')

    @property
    def decay_rate(self) -> float:
        return self._number('protocol.decay_rate_per_s')

    @property
    def n_exp(self) -> int:
        return int(self._number('protocol.n_exp'))

    def protocol(self) -> ProtocolConfig:
        return ProtocolConfig(self.signal(), self.total_time, self.dd(), self.decay_rate,
                              self.n_exp)

    def effective(self) -> EffectiveSignal:
        """Effective-frame signal: explicit 'effective' section or the protocol transform"""
        section = self.config.get('effective')
        if section:
            amplitude = hz_to_rad(self._number('effective.amplitude_hz'))
            amplitude_2 = self.get('effective.amplitude_2_hz')
            return EffectiveSignal.from_detunings(
                amplitude,
                hz_to_rad(self._number('effective.delta_s_hz')),
                hz_to_rad(float(self.get('effective.delta_r_hz', 0.0))),
                None if amplitude_2 is None else hz_to_rad(float(amplitude_2)),
            )
        return self.protocol().effective()

    def constants(self) -> ExperimentConstants:
        return ExperimentConstants.from_config(self.config.get('constants') or {})
