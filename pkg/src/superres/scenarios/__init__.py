"""
Scenario manifests, validation and the batch runner
"""

from .manifest import Assertion, RunManifest, Scenario, ScenarioKind
from .runner import RunReport, ScenarioReport, run, run_scenario
from .validation import Diagnostic, validate

__all__ = [
    'Assertion', 'Diagnostic', 'RunManifest', 'RunReport', 'Scenario', 'ScenarioKind',
    'ScenarioReport', 'run', 'run_scenario', 'validate',
]
