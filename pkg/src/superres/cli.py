#!/usr/bin/env python3
"""
superres CLI - scenario runner for two-tone superresolution sensing
Writes probability, Fisher information, estimator and readout tables as CSV/JSON artifacts
"""

import sys
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from . import __version__
from .core.config import ScenarioConfig
from .core.errors import ConfigError, SuperresError
from .core.units import hz_to_rad, rad_to_hz
from .estimation.estimator import Method
from .estimation.resolution import resolution_limit
from .log import setup_logging
from .scenarios.kinds import RunContext, estimator_table
from .scenarios.manifest import RunManifest
from .scenarios.runner import EXIT_CONFIG, EXIT_OK, run
from .scenarios.validation import ERROR, has_errors, validate as validate_config

# Create console with proper encoding for Windows
console = Console(force_terminal=True, legacy_windows=False)

MANIFEST_DIR = Path(__file__).parent / 'data' / 'manifests'
DEFAULT_MANIFEST = 'all'

STATUS_STYLES = {
    'passed': 'green',
    'failed': 'red',
    'error': 'red',
    'config_error': 'yellow',
}


def bundled_manifests():
    return sorted(MANIFEST_DIR.glob('*.json'))


def resolve_manifest(value: str) -> Path:
    """A file path, or the name of a bundled manifest with or without .json"""
    path = Path(value)
    if path.exists():
        return path
    bundled = MANIFEST_DIR / (value if value.endswith('.json') else f'{value}.json')
    if bundled.exists():
        return bundled
    raise ConfigError(f"No manifest file or bundled manifest named {value!r}")


def load_manifest(value: str) -> RunManifest:
    try:
        return RunManifest.load(resolve_manifest(value))
    except ConfigError as e:
        console.print(f"[red]X {e}[/red]")
        sys.exit(EXIT_CONFIG)


@click.group()
@click.version_option(__version__, prog_name='superres')
@click.option('--verbose', '-v', is_flag=True, help='Show debug logging')
@click.pass_context
def cli(ctx, verbose):
    """superres - resolve two nearly identical frequencies with a quantum sensor"""
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    setup_logging(verbose)


@cli.command('run')
@click.option('--manifest', '-m', default=DEFAULT_MANIFEST, show_default=True,
              help='Manifest file or bundled manifest name')
@click.option('--seed', type=click.IntRange(min=0), help='Override the manifest global seed')
@click.option('--out', '-o', 'out_dir', default='results', show_default=True,
              type=click.Path(file_okay=False), help='Output directory')
@click.option('--mc-samples', type=click.IntRange(min=1), help='Override Monte Carlo sample counts')
@click.option('--strict', is_flag=True, help='Treat validation warnings as errors')
@click.option('--jobs', '-j', default=1, show_default=True, type=click.IntRange(min=1),
              help='Scenarios to run in parallel')
@click.option('--workers', '-w', default=1, show_default=True, type=click.IntRange(min=1),
              help='Threads per Monte Carlo scenario')
@click.option('--only', multiple=True, help='Run only the named scenario (repeatable)')
@click.pass_context
def run_command(ctx, manifest, seed, out_dir, mc_samples, strict, jobs, workers, only):
    """Run a manifest and write CSV tables, summary.json and index.json"""
    run_manifest = load_manifest(manifest)
    try:
        report = run(run_manifest, Path(out_dir), seed, mc_samples, jobs, strict, list(only),
                     workers)
    except ConfigError as e:
        console.print(f"[red]X {e}[/red]")
        sys.exit(EXIT_CONFIG)

    if not report.scenarios:
        console.print("[yellow]Manifest has no scenarios[/yellow]")
        sys.exit(EXIT_OK)

    table = Table(title=f"Scenarios (seed {report.seed})")
    table.add_column("Name", style="cyan")
    table.add_column("Kind", style="blue")
    table.add_column("Status", width=12)
    table.add_column("Assertions", justify="right")
    table.add_column("Note", style="dim")
    for scenario in report.scenarios:
        passed = sum(1 for result in scenario.assertions if result['passed'])
        style = STATUS_STYLES.get(scenario.status, 'white')
        table.add_row(
            scenario.name,
            scenario.kind,
            f"[{style}]{scenario.status}[/{style}]",
            f"{passed}/{len(scenario.assertions)}",
            scenario.message[:60],
        )
    console.print(table)

    for scenario in report.scenarios:
        for result in scenario.assertions:
            if not result['passed']:
                console.print(f"[red]  {scenario.name}: {result['metric']} = {result['actual']}[/red]")
    console.print(f"\nArtifacts written to [cyan]{out_dir}[/cyan] ({len(report.index)} files)")
    sys.exit(report.exit_code)


@cli.command()
@click.argument('config_file', required=False, type=click.Path(exists=True, dir_okay=False))
@click.option('--manifest', '-m', help='Validate every scenario of a manifest instead')
@click.option('--strict', is_flag=True, help='Treat warnings as errors')
def validate(config_file, manifest, strict):
    """Check a scenario configuration (or all scenarios of a manifest)"""
    if not config_file and not manifest:
        raise click.UsageError("Give a CONFIG_FILE or --manifest")
    try:
        if manifest:
            targets = [(scenario.name, scenario.scenario_config())
                       for scenario in RunManifest.load(resolve_manifest(manifest)).scenarios]
        else:
            targets = [(config_file, ScenarioConfig.load(Path(config_file)))]
    except ConfigError as e:
        console.print(f"[red]X {e}[/red]")
        sys.exit(EXIT_CONFIG)

    failed = False
    for name, config in targets:
        diagnostics = validate_config(config)
        if not diagnostics:
            console.print(f"[green][OK][/green] {name}")
            continue
        console.print(f"[bold]{name}[/bold]")
        for diagnostic in diagnostics:
            color = 'red' if diagnostic.level == ERROR else 'yellow'
            console.print(f"  [{color}]{diagnostic.level}[/{color}] {diagnostic.field}: "
                          f"{diagnostic.message}")
        failed |= has_errors(diagnostics, strict)
    sys.exit(EXIT_CONFIG if failed else EXIT_OK)


@cli.command('list')
def list_manifests():
    """List the bundled manifests and their scenarios"""
    table = Table(title="Bundled manifests")
    table.add_column("Manifest", style="cyan")
    table.add_column("Scenarios", justify="right")
    table.add_column("Kinds", style="dim")
    for path in bundled_manifests():
        manifest = RunManifest.load(path)
        kinds = sorted({scenario.kind.value for scenario in manifest.scenarios})
        table.add_row(path.stem, str(len(manifest.scenarios)), ', '.join(kinds))
    console.print(table)


@cli.command()
@click.option('--amplitude-hz', default=16850.0, show_default=True, help='Effective amplitude')
@click.option('--delta-s-hz', default=12500.0, show_default=True, help='Mean detuning')
@click.option('--time-us', default=80.0, show_default=True, help='Interrogation time')
@click.option('--d-delta-s-hz', default=77.0, show_default=True, help='Uncertainty of delta_s')
@click.option('--d-amplitude-hz', default=100.0, show_default=True,
              help='Uncertainty of the amplitude')
@click.option('--method', type=click.Choice([m.value for m in Method]), default='auto',
              show_default=True)
def table(amplitude_hz, delta_s_hz, time_us, d_delta_s_hz, d_amplitude_hz, method):
    """Estimate delta_r for the measured contrasts of the bundled table manifest"""
    rows = next(scenario.parameters['rows']
                for scenario in RunManifest.load(MANIFEST_DIR / 'estimator_table.json').scenarios)
    config = ScenarioConfig({
        'effective': {'amplitude_hz': amplitude_hz, 'delta_s_hz': delta_s_hz},
        'protocol': {'total_time_s': time_us * 1e-6},
    })
    try:
        output = estimator_table(config, {
            'rows': rows, 'method': method, 'd_delta_s_hz': d_delta_s_hz,
            'd_amplitude_hz': d_amplitude_hz,
        }, RunContext())
    except SuperresError as e:
        console.print(f"[red]X {e}[/red]")
        sys.exit(EXIT_CONFIG)

    frame = output.frames['']
    result = Table(title=f"Estimated separation (all values in Hz, method {method})")
    for column in frame.columns:
        result.add_column(column, justify="right")
    for row in frame.itertuples(index=False):
        result.add_row(*[f"{value:.4g}" if isinstance(value, float) else str(value)
                         for value in row])
    console.print(result)


@cli.command()
@click.option('--amplitude-hz', default=16850.0, show_default=True, help='Effective amplitude')
@click.option('--delta-s-hz', default=12500.0, show_default=True, help='Mean detuning')
@click.option('--time-us', default=80.0, show_default=True, help='Interrogation time')
@click.option('--decay-rate', type=float, help='Decoherence rate in 1/s (default 1/T2)')
@click.option('--n-exp', default=132000, show_default=True, type=click.IntRange(min=1),
              help='Number of repetitions')
def resolution(amplitude_hz, delta_s_hz, time_us, decay_rate, n_exp):
    """Smallest resolvable separation, where the Cramer-Rao bound equals delta_r"""
    if decay_rate is None:
        decay_rate = ScenarioConfig().constants().decay_rate
    try:
        result = resolution_limit(hz_to_rad(amplitude_hz), hz_to_rad(delta_s_hz), time_us * 1e-6,
                                  decay_rate, n_exp)
    except SuperresError as e:
        console.print(f"[red]X {e}[/red]")
        sys.exit(EXIT_CONFIG)
    if not result.resolved:
        console.print("[yellow]The bound never drops below delta_r: not resolvable[/yellow]")
        return
    console.print(f"Resolution limit: [cyan]{rad_to_hz(result.delta_star):.2f} Hz[/cyan] "
                  f"(decay rate {decay_rate:.4g} 1/s, n_exp {n_exp})")


if __name__ == '__main__':
    cli()
