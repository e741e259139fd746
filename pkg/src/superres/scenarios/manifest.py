"""
Run manifests: named scenarios with their configuration and embedded assertions
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Any, List, Optional, Union

import numpy as np

from ..core.config import SCHEMA_VERSION, ScenarioConfig, read_document
from ..core.errors import ConfigError


class ScenarioKind(str, Enum):
    PROB_VS_TIME = 'ProbVsTime'
    FI_VS_TIME = 'FiVsTime'
    CONTRAST_VS_DELTA_R = 'ContrastVsDeltaR'
    ESTIMATOR_TABLE = 'EstimatorTable'
    SSR_TRACE = 'SsrTrace'
    RESOLUTION_LIMIT = 'ResolutionLimit'
    CALIBRATION = 'Calibration'
    PULSE_FIDELITY = 'PulseFidelity'
    ORACLE_CHECK = 'OracleCheck'
    CONTRAST_VS_TIME = 'ContrastVsTime'
    RAMSEY_PROBABILITY = 'RamseyProbability'
    EXPANSION_COEFFICIENTS = 'ExpansionCoefficients'
    APPROX_VS_EXACT = 'ApproxVsExact'
    CRB_VS_DELTA_R = 'CrbVsDeltaR'
    NOISE_BUDGET = 'NoiseBudget'


@dataclass(frozen=True)
class Assertion:
    """Check of one scenario metric: closeness to expected, or a [minimum, maximum] range"""
    metric: str
    expected: Any = None
    rel_tol: float = 0.0
    abs_tol: float = 0.0
    minimum: Optional[float] = None
    maximum: Optional[float] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Assertion':
        if 'metric' not in data:
            raise ConfigError("Assertion is missing 'metric'")
        if data.get('expected') is None and data.get('min') is None and data.get('max') is None:
            raise ConfigError(f"Assertion on {data['metric']} needs expected, min or max")
        return cls(data['metric'], data.get('expected'), float(data.get('rel_tol', 0.0)),
                   float(data.get('abs_tol', 0.0)), data.get('min'), data.get('max'))

    def to_dict(self) -> Dict[str, Any]:
        data = {'metric': self.metric}
        if self.expected is not None:
            data.update(expected=self.expected, rel_tol=self.rel_tol, abs_tol=self.abs_tol)
        if self.minimum is not None:
            data['min'] = self.minimum
        if self.maximum is not None:
            data['max'] = self.maximum
        return data

    def check(self, actual: Any) -> bool:
        if actual is None:
            return False
        values = np.asarray(actual, dtype=float)
        if not np.all(np.isfinite(values)):
            return False
        passed = True
        if self.expected is not None:
            expected = np.asarray(self.expected, dtype=float)
            if expected.shape and values.shape != expected.shape:
                return False
            passed &= bool(np.all(np.isclose(values, expected, rtol=self.rel_tol,
                                             atol=self.abs_tol)))
        if self.minimum is not None:
            passed &= bool(np.all(values >= self.minimum))
        if self.maximum is not None:
            passed &= bool(np.all(values <= self.maximum))
        return passed


@dataclass
class Scenario:
    """One named experiment in a run manifest"""
    name: str
    kind: ScenarioKind
    config: Dict[str, Any] = field(default_factory=dict)
    parameters: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    assertions: List[Assertion] = field(default_factory=list)
    id: Optional[str] = None

    def __post_init__(self):
        """Generate ID if not provided"""
        if not self.id:
            self.id = self._generate_id()

    def _generate_id(self) -> str:
        content = f"{self.name}{self.kind.value}"
        return f"scenario-{hashlib.sha256(content.encode()).hexdigest()[:8]}"

    @property
    def output_stem(self) -> str:
        return Path(self.output).stem if self.output else self.name

    def scenario_config(self) -> ScenarioConfig:
        return ScenarioConfig(self.config)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'Scenario':
        """Parse a manifest entry; a string config is a path relative to the manifest"""
        for key in ('name', 'kind'):
            if key not in data:
                raise ConfigError(f"Scenario entry is missing '{key}'")
        try:
            kind = ScenarioKind(data['kind'])
        except ValueError as exc:
            raise ConfigError(f"Unknown scenario kind {data['kind']!r}") from exc
        config = data.get('config') or {}
        if isinstance(config, str):
            path = Path(config)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            config = read_document(path)
        config.setdefault('schema_version', SCHEMA_VERSION)
        return cls(
            name=str(data['name']),
            kind=kind,
            config=config,
            parameters=dict(data.get('parameters') or {}),
            output=data.get('output'),
            assertions=[Assertion.from_dict(item) for item in data.get('assertions') or []],
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'kind': self.kind.value,
            'config': self.config,
            'parameters': self.parameters,
            'assertions': [assertion.to_dict() for assertion in self.assertions],
        }
        if self.output:
            data['output'] = self.output
        return data


@dataclass
class RunManifest:
    scenarios: List[Scenario] = field(default_factory=list)
    global_seed: int = 0
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'RunManifest':
        if data.get('schema_version') != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported manifest schema_version {data.get('schema_version')!r}")
        seed = data.get('global_seed', 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"global_seed must be an unsigned integer, got {seed!r}")
        scenarios = [Scenario.from_dict(item, base_dir) for item in data.get('scenarios') or []]
        names = [scenario.name for scenario in scenarios]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ConfigError(f"Duplicate scenario names: {', '.join(duplicates)}")
        return cls(scenarios, seed)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'RunManifest':
        path = Path(path)
        return cls.from_dict(read_document(path), path.parent)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': self.schema_version,
            'global_seed': self.global_seed,
            'scenarios': [scenario.to_dict() for scenario in self.scenarios],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
