import numpy as np
import pytest

from lambdasim import GridSpec, PhysParams, build_characteristic_table, propagate, solve_adiabatic


@pytest.fixture(scope="session")
def params():
    return PhysParams()


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def table(params, grid):
    return build_characteristic_table(params, grid)


@pytest.fixture(scope="session")
def numeric(params, grid):
    return propagate(params, grid)


@pytest.fixture(scope="session")
def adiabatic(params, grid, table):
    return solve_adiabatic(params, grid, table)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
