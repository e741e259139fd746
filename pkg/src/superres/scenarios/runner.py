"""
Scenario runner: executes a manifest and writes CSV tables, summary.json and index.json
"""

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Any, List, Optional

import numpy as np
import pandas as pd

from ..core.errors import AssertionFailure, ConfigError, SuperresError
from ..core.rng import stable_stream_id
from .kinds import KINDS, RunContext
from .manifest import RunManifest, Scenario
from .validation import Diagnostic, has_errors, validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

STATUS_PASSED = 'passed'
STATUS_FAILED = 'failed'
STATUS_CONFIG_ERROR = 'config_error'
STATUS_ERROR = 'error'


@dataclass
class ScenarioReport:
    name: str
    kind: str
    status: str
    metrics: Dict[str, Any] = field(default_factory=dict)
    assertions: List[Dict[str, Any]] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)
    message: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'status': self.status,
            'metrics': _jsonable(self.metrics),
            'assertions': self.assertions,
            'diagnostics': self.diagnostics,
            'artifacts': self.artifacts,
            'message': self.message,
        }


@dataclass
class RunReport:
    scenarios: List[ScenarioReport]
    seed: int
    index: Dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        statuses = {report.status for report in self.scenarios}
        if STATUS_CONFIG_ERROR in statuses:
            return EXIT_CONFIG
        if statuses & {STATUS_FAILED, STATUS_ERROR}:
            return EXIT_FAILED
        return EXIT_OK

    def raise_for_failures(self):
        """Raise AssertionFailure naming every assertion that did not hold"""
        failed = [f"{report.name}: {result['metric']}"
                  for report in self.scenarios for result in report.assertions
                  if not result['passed']]
        if failed:
            raise AssertionFailure('; '.join(failed))

    def summary(self) -> Dict[str, Any]:
        counts: Dict[str, int] = {}
        for report in self.scenarios:
            counts[report.status] = counts.get(report.status, 0) + 1
        return {
            'seed': self.seed,
            'exit_code': self.exit_code,
            'counts': counts,
            'scenarios': [report.to_dict() for report in self.scenarios],
        }


def _jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become strings"""
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for block in iter(lambda: handle.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


def write_frame(frame: pd.DataFrame, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator='\n', float_format='%.12g')


def _check_assertions(scenario: Scenario, metrics: Dict[str, Any]) -> List[Dict[str, Any]]:
    results = []
    for assertion in scenario.assertions:
        actual = metrics.get(assertion.metric)
        passed = assertion.check(actual)
        if not passed:
            logger.warning("%s: %s = %r outside %s", scenario.name, assertion.metric, actual,
                           assertion.to_dict())
        results.append(dict(assertion.to_dict(), actual=_jsonable(actual), passed=passed))
    return results


def run_scenario(scenario: Scenario, out_dir: Path, seed: int,
                 mc_samples: Optional[int] = None, strict: bool = False,
                 workers: int = 1) -> ScenarioReport:
    """Validate, execute and check one scenario"""
    report = ScenarioReport(scenario.name, scenario.kind.value, STATUS_PASSED)
    try:
        config = scenario.scenario_config()
        diagnostics: List[Diagnostic] = validate(config)
    except ConfigError as exc:
        report.status, report.message = STATUS_CONFIG_ERROR, str(exc)
        return report
    report.diagnostics = [str(d) for d in diagnostics]
    if has_errors(diagnostics, strict):
        report.status = STATUS_CONFIG_ERROR
        report.message = '; '.join(report.diagnostics)
        return report

    ctx = RunContext(seed, stable_stream_id(scenario.name), mc_samples, workers)
    started = time.perf_counter()
    try:
        output = KINDS[scenario.kind](config, scenario.parameters, ctx)
    except ConfigError as exc:
        report.status, report.message = STATUS_CONFIG_ERROR, str(exc)
        return report
    except SuperresError as exc:
        logger.error("%s failed: %s", scenario.name, exc)
        report.status, report.message = STATUS_ERROR, str(exc)
        return report
    except Exception as exc:
        logger.exception("%s raised unexpectedly", scenario.name)
        report.status, report.message = STATUS_ERROR, f"{type(exc).__name__}: {exc}"
        return report
    logger.info("%s finished in %.2f s", scenario.name, time.perf_counter() - started)

    for suffix, frame in output.frames.items():
        name = f"{scenario.output_stem}{'_' + suffix if suffix else ''}.csv"
        write_frame(frame, out_dir / name)
        report.artifacts.append(name)
    report.metrics = output.metrics
    report.assertions = _check_assertions(scenario, output.metrics)
    if not all(result['passed'] for result in report.assertions):
        report.status = STATUS_FAILED
    return report


def run(manifest: RunManifest, out_dir: Path, seed: Optional[int] = None,
        mc_samples: Optional[int] = None, jobs: int = 1, strict: bool = False,
        names: Optional[List[str]] = None, workers: int = 1) -> RunReport:
    """
    Run every scenario (or the named subset) and write the artifacts.

    Scenarios run concurrently with jobs > 1 and each Monte Carlo scenario spreads its samples
    over workers; reports and index entries keep manifest order and the output depends on
    neither count.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = manifest.global_seed if seed is None else int(seed)
    scenarios = manifest.scenarios
    if names:
        unknown = set(names) - {scenario.name for scenario in scenarios}
        if unknown:
            raise ConfigError(f"Unknown scenarios: {', '.join(sorted(unknown))}")
        scenarios = [scenario for scenario in scenarios if scenario.name in names]

    def execute(scenario: Scenario) -> ScenarioReport:
        logger.info("Running %s (%s)", scenario.name, scenario.kind.value)
        return run_scenario(scenario, out_dir, seed, mc_samples, strict, workers)

    if jobs > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(execute, scenarios))
    else:
        reports = [execute(scenario) for scenario in scenarios]

    report = RunReport(reports, seed)
    summary_path = out_dir / 'summary.json'
    summary_path.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + '\n',
                            encoding='utf-8')
    artifacts = [name for scenario_report in reports for name in scenario_report.artifacts]
    report.index = {name: sha256_file(out_dir / name) for name in artifacts}
    (out_dir / 'index.json').write_text(json.dumps(report.index, indent=2, sort_keys=True) + '\n',
                                        encoding='utf-8')
    return report
