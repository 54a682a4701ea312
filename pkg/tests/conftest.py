"""Shared fixtures for the SymCentral test suite."""
import numpy as np
import pytest

from symcentral.config import get_config
from symcentral.core.groups_01 import catalog_group
from symcentral.core.nbody_03 import load_configuration
from symcentral.core.reduction_04 import load_ansatz
from symcentral.core.solver_05 import SolveOptions
from symcentral.fixtures import fixture_path


@pytest.fixture(autouse=True)
def default_config(monkeypatch):
    """Every test starts from the packaged config and no seed override."""
    monkeypatch.delenv('SYMCENTRAL_SEED', raising=False)
    get_config().load()
    yield
    get_config().load()


@pytest.fixture
def opts():
    """Small, single-threaded solver options."""
    return SolveOptions.from_config(starts=8, census_starts=64, workers=1, seed=0)


@pytest.fixture
def ansatz():
    return lambda name: load_ansatz(fixture_path(name))


@pytest.fixture
def configuration():
    return lambda name: load_configuration(fixture_path(name))


@pytest.fixture(scope='module')
def d3():
    return catalog_group('D_3')


@pytest.fixture(scope='module')
def d4():
    return catalog_group('D_4')


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
