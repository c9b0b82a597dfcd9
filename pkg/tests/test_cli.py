import io
import json
import logging
import math

import pandas as pd
import pytest

from hardylab import estimates
from hardylab.__main__ import main
from hardylab.framework.store import STORE_ENV, ResultsStore


@pytest.fixture(autouse=True)
def no_default_store(monkeypatch):
    monkeypatch.delenv(STORE_ENV, raising=False)
    yield
    for name in ('hardylab', 'py.warnings'):
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_basis_csv(capsys):
    code, out = run_cli(capsys, 'basis', '--system', 'laguerre-std', '--alpha', '0', '--k', '0', '--u', '0.5,2')
    assert code == 0
    table = pd.read_csv(io.StringIO(out))
    assert list(table.columns) == ['u', 'value']
    assert table['value'].tolist() == pytest.approx([math.exp(-0.25), math.exp(-1.)], rel=1e-14)


def test_basis_points_file(capsys, tmp_path):
    points = tmp_path / 'points.txt'
    points.write_text('0.5\n1.5\n')
    code, out = run_cli(capsys, '--format', 'json', 'basis', '--system', 'laguerre-hermite', '--alpha', '1/2',
                        '--k', '1', '--points', str(points), '--deriv', '1')
    assert code == 0
    data = json.loads(out)
    assert data['deriv'] == 1
    assert data['system'] == {'family': 'laguerre-hermite', 'd': 1, 'alpha': ['1/2']}
    assert data['table']['columns'] == ['u', 'value']
    assert len(data['table']['rows']) == 2


def test_hardy_exponent_json(capsys):
    code, out = run_cli(capsys, '--format', 'json', 'hardy', 'exponent', '--system', 'laguerre-std', '--p', '1/2',
                        '--s', '1', '--d', '2')
    assert code == 0
    data = json.loads(out)
    assert data['E'] == 4
    assert data['gamma'] == '1/2'
    assert data['consistent'] is True


def test_gamma_csv(capsys):
    code, out = run_cli(capsys, 'hardy', 'gamma', '--system', 'generalized-hermite')
    assert code == 0
    assert out.splitlines() == ['action,gamma', 'gamma,1/4']


def test_atom_constants(capsys):
    code, out = run_cli(capsys, '--format', 'json', 'atom', 'constants', '--p', '1', '--delta', '1/10')
    assert code == 0
    data = json.loads(out)
    assert data['constants'] == ['1/9']
    assert data['P'] == 0


def test_output_file_and_log_dir(capsys, tmp_path):
    out_file = tmp_path / 'gamma.json'
    code, out = run_cli(capsys, '--format', 'json', '--out', str(out_file), '--log-dir', str(tmp_path / 'logs'),
                        'hardy', 'gamma', '--system', 'jacobi')
    assert code == 0
    assert out == ''
    assert json.loads(out_file.read_text())['gamma'] == '1/2'
    assert (tmp_path / 'logs' / 'hardylab.log').exists()


def test_store_reuses_records(capsys, tmp_path, monkeypatch):
    path = tmp_path / 'runs.jsonl'
    monkeypatch.setenv(STORE_ENV, str(path))
    argv = ['--format', 'json', 'atom', 'build', '--p', '2/3', '--A', '4', '--delta', '1/20']
    code, first = run_cli(capsys, *argv)
    assert code == 0
    code, second = run_cli(capsys, '--format', 'csv', *argv[2:])
    assert code == 0
    records = ResultsStore(path).records()
    assert len(records) == 1
    assert records[0].command == 'atom'
    assert json.loads(first) == records[0].outputs
    assert pd.read_csv(io.StringIO(second)).shape[0] == len(records[0].outputs['table']['rows'])


def test_config_file(capsys, tmp_path):
    config = tmp_path / 'settings.yaml'
    config.write_text('format: json\n')
    code, out = run_cli(capsys, '--config', str(config), 'hardy', 'gamma', '--system', 'laguerre-std')
    assert code == 0
    assert json.loads(out)['gamma'] == '1/2'

    config.write_text('plot: true\n')
    code, _ = run_cli(capsys, '--config', str(config), 'hardy', 'gamma', '--system', 'laguerre-std')
    assert code == 2


def test_exit_codes(capsys):
    code, _ = run_cli(capsys, '--panel-budget', '0', 'hardy', 'gamma', '--system', 'jacobi')
    assert code == 2
    code, _ = run_cli(capsys, 'basis', '--system', 'laguerre-std', '--alpha', '0', '--k', '0', '--u=-1')
    assert code == 3
    code, _ = run_cli(capsys, 'hardy', 'exponent', '--system', 'jacobi', '--p', '3/2')
    assert code == 3


def test_failed_check_is_stored(capsys, tmp_path, monkeypatch):
    def failing(system, k_grid, u_grid=None):
        return estimates.EstimateCheck('regime', 'k in [4]', 9., False, pd.DataFrame({'k': [4], 'ratio': [9.]}))

    monkeypatch.setattr(estimates, 'check_regime_bounds', failing)
    path = tmp_path / 'runs.jsonl'
    code, out = run_cli(capsys, '--store', str(path), 'estimates', 'regime', '--system', 'laguerre-std',
                        '--alpha', '0', '--kgrid', '4')
    assert code == 5
    assert pd.read_csv(io.StringIO(out))['ratio'].tolist() == [9.]
    assert ResultsStore(path).records()[0].outputs['passed'] is False


def test_kernel_spectral_reports_tail_estimate(capsys):
    code, out = run_cli(capsys, '--format', 'json', 'kernel', 'spectral', '--system', 'laguerre-hermite',
                        '--alpha', '0', '--r', '0.5', '--u', '1', '--v', '1.5')
    assert code == 0
    data = json.loads(out)
    assert 'tail_bound' not in data
    assert 0 <= data['tail_estimate'] <= 1e-12
    assert data['tail_rigorous'] is False
    code, out = run_cli(capsys, '--format', 'json', 'kernel', 'spectral', '--system', 'laguerre-std',
                        '--alpha', '0', '--r', '0.5', '--u', '1', '--v', '1.5')
    assert code == 0
    assert json.loads(out)['tail_rigorous'] is True
