import pytest

from treelab.expansion import ExpansionParams, materialize
from treelab.graphs import make_complete_bipartite

FLAGSHIP_LIMIT = 1 << 22


@pytest.fixture(scope="session")
def k22():
    return make_complete_bipartite(2)


@pytest.fixture(scope="session")
def toy_params(k22):
    # N=3, K=1 toy: 32 vertices, fully enumerable by hand
    return ExpansionParams(k22, N=3, subset=[1])


@pytest.fixture(scope="session")
def toy_mat(toy_params):
    return materialize(toy_params, FLAGSHIP_LIMIT)


@pytest.fixture(scope="session")
def flagship_params(k22):
    # all 16 orientations of K_{2,2}, N=2: the million-vertex instance
    return ExpansionParams(k22, N=2)


@pytest.fixture(scope="session")
def flagship_mat(flagship_params):
    return materialize(flagship_params, FLAGSHIP_LIMIT)
