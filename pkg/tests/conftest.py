import json

import pytest

from tomoclt import create_app
from tomoclt.config import TestingConfig
from tomoclt.discretization import discretize_transform, make_grid, make_test_function
from tomoclt.phantoms import BumpPhantom, ConstantPhantom, ParabolaPhantom
from tomoclt.utils.rng import keyed_stream


@pytest.fixture
def rng():
    return keyed_stream(12345)


@pytest.fixture
def app():
    return create_app(TestingConfig)


@pytest.fixture
def constant():
    return ConstantPhantom(c=1.0)


@pytest.fixture
def parabola():
    return ParabolaPhantom(alpha=0.5, beta=0.5)


@pytest.fixture
def bump():
    return BumpPhantom()


@pytest.fixture
def grid8():
    return make_grid(8, 8)


@pytest.fixture
def grid16():
    return make_grid(16, 16)


@pytest.fixture
def g8(grid8):
    return make_test_function(grid8)


@pytest.fixture
def g16(grid16):
    return make_test_function(grid16)


@pytest.fixture
def x8(parabola, grid8):
    return discretize_transform(parabola, grid8)


@pytest.fixture
def x16(parabola, grid16):
    return discretize_transform(parabola, grid16)


@pytest.fixture
def config_data():
    """Configuración chica para pruebas rápidas"""
    return {
        'phantom': {'kind': 'parabola', 'id': 'parabola', 'alpha': 0.5, 'beta': 0.5},
        'grids': [[8, 8]],
        'doses': [100, 1000, 10000],
        'spec': {'a': 3, 'b': 1, 'mode': 'add_one'},
        'replicates': 20,
        'seed': 7,
    }


@pytest.fixture
def config_file(tmp_path, config_data):
    def write(**changes):
        data = dict(config_data, **changes)
        path = tmp_path / 'experimento.json'
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)
    return write
