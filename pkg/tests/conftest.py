import numpy as np
import pytest

from isonodal.graph import LeafPairSpec, build_graph, path_graph, star_graph


@pytest.fixture
def k13():
    return star_graph(3)


@pytest.fixture
def paw():
    return build_graph(4, [(0, 1), (0, 2), (1, 2), (0, 3)])


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def k13_pair():
    return LeafPairSpec(0, (1,), (2,))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
