import json

import pytest

from superres.core.config import SCHEMA_VERSION, ScenarioConfig, deep_merge, read_document
from superres.core.errors import ConfigError
from superres.core.units import rad_to_hz


def test_defaults():
    config = ScenarioConfig()
    assert config.total_time == pytest.approx(80e-6)
    assert config.n_exp == 132000
    assert config.decay_rate == 0.0
    assert config.get('schema_version') == SCHEMA_VERSION
    assert config.dd().pulse_count == 400


def test_dotted_access():
    config = ScenarioConfig()
    assert config.get('readout.ssr.readouts') == 700
    assert config.get('pulse.duration_s', 37e-6) == 37e-6
    assert config.get('no.such.key') is None
    config.set('protocol.n_exp', 1000)
    config.set('extra.depth.value', 3)
    assert config.n_exp == 1000
    assert config.get('extra.depth.value') == 3


def test_update_merges_deeply():
    config = ScenarioConfig()
    config.update({'protocol': {'n_exp': 10}})
    assert config.n_exp == 10
    assert config.total_time == pytest.approx(80e-6)
    merged = deep_merge({'a': {'b': 1, 'c': 2}}, {'a': {'c': 3}})
    assert merged == {'a': {'b': 1, 'c': 3}}


@pytest.mark.parametrize('name', ['scenario.json', 'scenario.yaml'])
def test_save_and_load(tmp_path, name):
    config = ScenarioConfig({'protocol': {'n_exp': 77}})
    path = tmp_path / 'nested' / name
    config.save(path)
    loaded = ScenarioConfig.load(path)
    assert loaded.n_exp == 77
    assert loaded.to_dict() == config.to_dict()


def test_schema_version_must_match():
    with pytest.raises(ConfigError):
        ScenarioConfig({'schema_version': 2})


def test_reference_configuration(config_dir):
    eff = ScenarioConfig.load(config_dir / 'reference.json').effective()
    assert rad_to_hz(eff.amplitude) == pytest.approx(16850.0)
    assert rad_to_hz(eff.delta_s) == pytest.approx(12500.0)
    assert eff.delta_r == 0.0


def test_lab_frame_configuration(config_dir):
    eff = ScenarioConfig.load(config_dir / 'lab_frame.json').effective()
    assert rad_to_hz(eff.amplitude) == pytest.approx(16766.0, rel=1e-3)
    assert rad_to_hz(eff.delta_s) == pytest.approx(-12500.0, rel=1e-6)


def test_fractional_pulse_count():
    with pytest.raises(ConfigError):
        ScenarioConfig({'dd': {'pulse_count': 400.5}}).dd()


def test_non_numeric_value():
    with pytest.raises(ConfigError):
        _ = ScenarioConfig({'protocol': {'total_time_s': 'long'}}).total_time


@pytest.mark.parametrize('name, text', [
    ('broken.json', '{"protocol": '),
    ('list.json', '[1, 2]'),
    ('broken.yaml', 'protocol: [unclosed'),
])
def test_bad_documents(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    with pytest.raises(ConfigError):
        read_document(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ScenarioConfig.load(tmp_path / 'absent.json')


def test_json_on_disk_is_plain(tmp_path):
    path = tmp_path / 'out.json'
    ScenarioConfig().save(path)
    assert json.loads(path.read_text())['protocol']['n_exp'] == 132000


@pytest.mark.parametrize('count', ['x', True, float('inf')])
def test_pulse_count_type(count):
    with pytest.raises(ConfigError):
        ScenarioConfig({'dd': {'pulse_count': count}}).dd()
