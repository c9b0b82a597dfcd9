from fractions import Fraction

import numpy as np
import pytest

import hardylab
import hardylab.parameters
from hardylab import components
from hardylab.commands import build_system, point_grid
from hardylab.framework.config_check import (
    ConfigCheck,
    ConfigChoice,
    ConfigError,
    ConfigItem,
    check_positive,
    parse_number_list,
    parse_rational,
    read_points_file,
)
from hardylab.framework.errors import Error


def test_read_flat_file(tmp_path):
    file = tmp_path / 'settings.yaml'
    file.write_text('abs_tol: 1.0e-10\npanel_budget: 100\nformat: json\n')
    assert hardylab.parameters.read(file) == {'abs_tol': 1e-10, 'panel_budget': 100, 'format': 'json'}
    empty = tmp_path / 'empty.yaml'
    empty.write_text('')
    assert hardylab.parameters.read(empty) == {}


@pytest.mark.parametrize('content', ['abs_tol: 1\nfoo: 2\n', 'abs_tol:\n  nested: 1\n', '- 1\n- 2\n', 'a: [1\n'])
def test_read_rejects_bad_files(tmp_path, content):
    file = tmp_path / 'settings.yaml'
    file.write_text(content)
    with pytest.raises(ConfigError) as info:
        hardylab.parameters.read(file)
    assert info.value.path == ['config']
    assert info.value.exit_code == 2


def test_read_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        hardylab.parameters.read(tmp_path / 'missing.yaml')


def test_config_check_fills_defaults():
    config = {'b': 2}
    template = {
        'a': ConfigItem(check_positive, default=1.5),
        'b': ConfigItem(check_positive),
        'c': ConfigItem(optional=True),
        'mode': ConfigChoice('x', 'y', default='x'),
    }
    ConfigCheck(template, config).validate()
    assert config == {'a': 1.5, 'b': 2, 'c': None, 'mode': 'x'}


@pytest.mark.parametrize('config,path', [
    ({}, ['b']),
    ({'b': -1}, ['b']),
    ({'b': 1, 'mode': 'z'}, ['mode']),
])
def test_config_check_errors(config, path):
    template = {'b': ConfigItem(check_positive), 'mode': ConfigChoice('x', 'y', default='x')}
    with pytest.raises(ConfigError) as info:
        ConfigCheck(template, config).validate()
    assert info.value.path == path


def test_lab_run_settings_are_typed():
    run = components.make_run({'command': 'basis', 'system': 'laguerre-std', 'alpha': '0', 'k': 1, 'u': '1',
                               'abs_tol': '1e-9', 'panel_budget': 50.})
    run._configure()
    assert run.config['abs_tol'] == 1e-9
    assert run.config['panel_budget'] == 50
    assert run.config['rel_tol'] == hardylab.parameters.defaults['rel_tol']
    assert run.config['d'] == 1

    run = components.make_run({'command': 'basis', 'system': 'laguerre-std', 'alpha': '0', 'k': 1, 'u': '1',
                               'panel_budget': 2.5})
    with pytest.raises(ConfigError) as info:
        run._configure()
    assert info.value.path == ['panel_budget']


def test_make_run_errors():
    with pytest.raises(ConfigError):
        components.make_run({})
    with pytest.raises(ConfigError):
        components.make_run({'command': 'plot'})
    assert components.list_components() == ['atom', 'basis', 'estimates', 'hardy', 'kernel', 'sharpness']


def test_run_id_ignores_output_settings():
    config = {'command': 'hardy', 'action': 'gamma', 'system': 'jacobi'}
    first = components.make_run(dict(config, format='json', out='a.json'))
    second = components.make_run(dict(config, format='csv', store='other.jsonl', func=print))
    first._configure()
    second._configure()
    assert first.run_id() == second.run_id()
    third = components.make_run(dict(config, system='laguerre-std'))
    third._configure()
    assert third.run_id() != first.run_id()


def test_parse_rational():
    assert parse_rational('2/3') == Fraction(2, 3)
    assert parse_rational(' 0.1 ') == Fraction(1, 10)
    assert parse_rational(0.1) == Fraction(1, 10)
    assert parse_rational(3) == 3
    with pytest.raises(Error):
        parse_rational('two thirds')
    assert parse_number_list('1, 1/2, 0.25') == [1, Fraction(1, 2), Fraction(1, 4)]
    assert parse_number_list([1, 2]) == [1, 2]


def test_points_file(tmp_path):
    file = tmp_path / 'points.txt'
    file.write_text('# grid\n0.5, 1.0\n2.5 3  # tail\n\n')
    np.testing.assert_array_equal(read_points_file(file), [0.5, 1., 2.5, 3.])
    np.testing.assert_array_equal(point_grid({'points': file, 'u': '9'}), [0.5, 1., 2.5, 3.])

    file.write_text('0.5\n1.0 x2\n')
    with pytest.raises(ConfigError) as info:
        read_points_file(file)
    assert ':2:5:' in info.value.message

    file.write_text('# nothing\n')
    with pytest.raises(ConfigError):
        read_points_file(file)
    with pytest.raises(ConfigError):
        point_grid({'u': None})


def test_build_system_keeps_rationals():
    system = build_system({'system': 'laguerre-hermite', 'alpha': '1/2,3/2', 'beta': None, 'lam': None, 'd': 2})
    assert system.d == 2
    assert system.coordinate(1).alpha == (Fraction(3, 2),)
    placeholder = build_system({'system': 'jacobi', 'alpha': None, 'beta': None, 'lam': None, 'd': 1},
                               placeholder=True)
    assert placeholder.alpha == placeholder.beta == (0,)
