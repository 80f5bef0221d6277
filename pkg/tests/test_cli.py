import csv
import os

import pytest

from tomoclt.cli import main
from tomoclt.utils.helpers import load_json


@pytest.fixture(autouse=True)
def testing_env(monkeypatch):
    monkeypatch.setenv('TOMOCLT_ENV', 'testing')


def read_csv(path):
    with open(path, encoding='utf-8', newline='') as handle:
        return list(csv.DictReader(handle))


def test_phantom_catalog(capsys):
    assert main(['phantom']) == 0
    out = capsys.readouterr().out
    for word in ('constant', 'parabola', 'bump', 'closed_form', 'lipschitz_bound'):
        assert word in out


def test_version(capsys):
    assert main(['--version']) == 0
    assert 'tomoclt' in capsys.readouterr().out


def test_unknown_subcommand():
    assert main(['reconstruir']) == 2


def test_missing_config_is_io_error(tmp_path, capsys):
    out = tmp_path / 'salida'
    code = main(['lln', '--config', str(tmp_path / 'no_existe.json'), '--out', str(out)])
    assert code == 4
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith('error=io message=')
    assert not out.exists()


def test_invalid_json_is_config_error(tmp_path, capsys):
    path = tmp_path / 'roto.json'
    path.write_text('{"grids": [[8, 8]', encoding='utf-8')
    assert main(['clt', '--config', str(path), '--out', str(tmp_path)]) == 2
    assert 'error=config' in capsys.readouterr().err


@pytest.mark.parametrize('changes', [
    {'grids': []},
    {'doses': [0, 10]},
    {'spec': {'a': 0}},
    {'phantom': {'kind': 'elipse'}},
    {'sampler': 'normal'},
    {'desconocida': 1},
])
def test_invalid_schema_is_config_error(config_file, tmp_path, changes):
    assert main(['lln', '--config', config_file(**changes), '--out', str(tmp_path / 'x')]) == 2
    assert not (tmp_path / 'x').exists()


def test_lln_writes_csv_and_manifest(config_file, tmp_path, capsys):
    out = tmp_path / 'salida'
    assert main(['lln', '--config', config_file(), '--out', str(out)]) == 0
    rows = read_csv(out / 'lln.csv')
    assert len(rows) == 9
    assert 'slope' in rows[0]
    assert all(-0.6 <= float(r['slope']) <= -0.4 for r in rows)
    manifest = load_json(out / 'lln.json')
    assert manifest['csv'] == 'lln.csv'
    assert manifest['seed'] == 7
    assert 'lln: 9 filas' in capsys.readouterr().out


def test_seed_override(config_file, tmp_path):
    base, other = tmp_path / 'base', tmp_path / 'otra'
    assert main(['lln', '--config', config_file(), '--out', str(base)]) == 0
    assert main(['lln', '--config', config_file(), '--out', str(other), '--seed', '99']) == 0
    assert load_json(other / 'lln.json')['seed'] == 99
    assert read_csv(base / 'lln.csv') != read_csv(other / 'lln.csv')


def test_worker_count_does_not_change_output(config_file, tmp_path):
    path = config_file(replicates=8)
    for workers in ('1', '2'):
        assert main(['modes', '--config', path, '--out', str(tmp_path / workers),
                     '--workers', workers, '--log-level', 'error']) == 0
    with open(tmp_path / '1' / 'modes.csv', 'rb') as a, open(tmp_path / '2' / 'modes.csv', 'rb') as b:
        assert a.read() == b.read()


def test_sinogram_export(config_file, tmp_path):
    out = tmp_path / 'sino'
    assert main(['sinogram', '--config', config_file(), '--out', str(out)]) == 0
    assert sorted(os.listdir(out)) == ['sinogram.json', 'sinogram_X.csv', 'sinogram_counts.csv']
    with open(out / 'sinogram_X.csv', encoding='utf-8', newline='') as handle:
        matrix = list(csv.reader(handle))
    assert len(matrix) == 8 and all(len(row) == 8 for row in matrix)
    assert all(float(v) == 0.0 for v in matrix[-1])
    sidecar = load_json(out / 'sinogram.json')
    assert sidecar['N'] == 100 and sidecar['stream'] == '6.0'


def test_simulate_export(config_file, tmp_path, capsys):
    out = tmp_path / 'sim'
    assert main(['simulate', '--config', config_file(), '--out', str(out)]) == 0
    assert {'Y_add_one.csv', 'Y_max_one.csv', 'Y_resample.csv', 'simulate.json'} <= set(os.listdir(out))
    assert load_json(out / 'simulate.json')['modes'] == ['add_one', 'max_one', 'resample']
    assert capsys.readouterr().out.startswith('simulate modes=add_one,max_one,resample')


def test_degenerate_test_function_is_numerical_error(config_file, tmp_path, capsys):
    path = config_file(doses=[1000], test_function={'c0': 0.0, 'c1': 0.0, 'c2': 0.0})
    assert main(['be', '--config', path, '--out', str(tmp_path / 'be')]) == 3
    assert capsys.readouterr().err.strip().splitlines()[-1].startswith('error=varianza')
    assert not (tmp_path / 'be' / 'be.csv').exists()


def test_variance_subcommand(config_file, tmp_path):
    path = config_file(grids=[[4, 4], [8, 8], [16, 16]], doses=[10 ** 5])
    assert main(['variance', '--config', path, '--out', str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / 'variance.csv')) == 3


@pytest.mark.parametrize('flag', [['--seed', '-1'], ['--workers', '0'], ['--log-level', 'verbose']])
def test_rejects_bad_flags(flag):
    assert main(['phantom', *flag]) == 2


def test_failed_write_leaves_no_partial_output(config_file, tmp_path, capsys):
    out = tmp_path / 'salida'
    (out / 'lln.json').mkdir(parents=True)
    assert main(['lln', '--config', config_file(), '--out', str(out)]) == 4
    assert capsys.readouterr().err.strip().splitlines()[-1].startswith('error=io message=')
    assert os.listdir(out) == ['lln.json']


def test_failed_sinogram_export_leaves_no_partial_output(config_file, tmp_path):
    out = tmp_path / 'sino'
    (out / 'sinogram.json').mkdir(parents=True)
    assert main(['sinogram', '--config', config_file(), '--out', str(out)]) == 4
    assert os.listdir(out) == ['sinogram.json']
