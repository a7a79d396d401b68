import numpy as np
import pytest

import cascade_at as ca


@pytest.fixture(scope="session")
def case_a():
    return ca.preset("case_a")


@pytest.fixture(scope="session")
def case_b():
    return ca.preset("case_b")


@pytest.fixture(scope="session")
def gh200():
    return ca.QuadratureRule.gauss_hermite(200)


def local_minima(grid, vals):
    """Indices of strict interior local minima."""
    vals = np.asarray(vals)
    mask = (vals[1:-1] < vals[:-2]) & (vals[1:-1] < vals[2:])
    return np.nonzero(mask)[0] + 1


def local_maxima(grid, vals):
    vals = np.asarray(vals)
    mask = (vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:])
    return np.nonzero(mask)[0] + 1
