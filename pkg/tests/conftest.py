import numpy as np
import pytest

from harmonia import spaces
from harmonia.grids import lambda_grid, line_grid, radial_grid


@pytest.fixture(scope="session")
def h3():
    return spaces.hyperbolic(3)


@pytest.fixture(scope="session")
def h2():
    return spaces.hyperbolic(2)


@pytest.fixture(scope="session")
def e3():
    return spaces.euclidean(3)


@pytest.fixture(scope="session")
def e1():
    return spaces.euclidean(1)


@pytest.fixture(scope="session")
def dr():
    return spaces.damek_ricci(2, 1)


@pytest.fixture(scope="session")
def grid():
    return radial_grid()


@pytest.fixture(scope="session")
def lgrid():
    return lambda_grid()


@pytest.fixture(scope="session")
def sgrid():
    return line_grid()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
