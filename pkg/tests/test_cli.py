import io
import json

import pytest
from click.testing import CliRunner

from superres.cli import cli
from superres.cli_wrapper import utf8_stream

MANIFEST = {
    'schema_version': 1,
    'global_seed': 11,
    'scenarios': [{
        'name': 'budget',
        'kind': 'NoiseBudget',
        'output': 'budget.csv',
        'assertions': [{'metric': 'sigma_qpn', 'expected': 0.024, 'rel_tol': 1e-6}],
    }],
}


@pytest.fixture
def runner():
    return CliRunner()


def write_json(path, document):
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


def test_version(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert '1.0.0' in result.output


def test_list(runner):
    result = runner.invoke(cli, ['list'])
    assert result.exit_code == 0
    assert 'estimator_table' in result.output


def test_run(runner, tmp_path):
    manifest = write_json(tmp_path / 'manifest.json', MANIFEST)
    out = tmp_path / 'out'
    result = runner.invoke(cli, ['run', '-m', str(manifest), '-o', str(out)])
    assert result.exit_code == 0, result.output
    assert (out / 'budget.csv').exists()
    assert 'budget.csv' in json.loads((out / 'index.json').read_text())


def test_run_failing_assertion(runner, tmp_path):
    document = json.loads(json.dumps(MANIFEST))
    document['scenarios'][0]['assertions'][0]['expected'] = 1.0
    manifest = write_json(tmp_path / 'manifest.json', document)
    result = runner.invoke(cli, ['run', '-m', str(manifest), '-o', str(tmp_path / 'out')])
    assert result.exit_code == 1


def test_run_empty_manifest(runner, tmp_path):
    manifest = write_json(tmp_path / 'empty.json', {'schema_version': 1})
    result = runner.invoke(cli, ['run', '-m', str(manifest), '-o', str(tmp_path / 'out')])
    assert result.exit_code == 0
    assert 'no scenarios' in result.output


def test_run_unknown_manifest(runner, tmp_path):
    result = runner.invoke(cli, ['run', '-m', 'no_such_manifest', '-o', str(tmp_path)])
    assert result.exit_code == 2


def test_validate_bad_file(runner, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"protocol": ', encoding='utf-8')
    assert runner.invoke(cli, ['validate', str(path)]).exit_code == 2


def test_validate_bundled_manifest(runner):
    result = runner.invoke(cli, ['validate', '--manifest', 'contrast'])
    assert result.exit_code == 0, result.output


def test_validate_needs_a_target(runner):
    assert runner.invoke(cli, ['validate']).exit_code == 2


def test_table(runner):
    result = runner.invoke(cli, ['table'])
    assert result.exit_code == 0, result.output
    assert 'Estimated separation' in result.output


def test_resolution(runner):
    result = runner.invoke(cli, ['resolution'])
    assert result.exit_code == 0, result.output
    assert '23.' in result.output


def test_run_with_workers(runner, tmp_path):
    manifest = write_json(tmp_path / 'manifest.json', MANIFEST)
    result = runner.invoke(cli, ['run', '-m', str(manifest), '-o', str(tmp_path / 'out'),
                                 '--workers', '2'])
    assert result.exit_code == 0, result.output


def test_streams_switch_to_utf8():
    buffer = io.BytesIO()
    stream = utf8_stream(io.TextIOWrapper(buffer, encoding='latin-1'))
    stream.write('δ_r ± 2 Hz')
    stream.flush()
    assert buffer.getvalue().decode('utf-8') == 'δ_r ± 2 Hz'
    assert utf8_stream(stream) is stream
