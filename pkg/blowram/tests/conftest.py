import itertools
import logging
import pathlib

import numpy as np
import pytest

from blowram.graph import Graph

logger = logging.getLogger(__name__)

MODULE_PATH = pathlib.Path(__file__).parent
UTILS_PATH = MODULE_PATH / 'utils'


def random_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    """A seeded random graph for property checks."""
    edges = [
        pair for pair in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


@pytest.fixture(scope='function')
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def k2():
    return Graph.complete(2)


@pytest.fixture(scope='session')
def k3():
    return Graph.complete(3)


@pytest.fixture(scope='session')
def k5():
    return Graph.complete(5)


@pytest.fixture(scope='session')
def k6():
    return Graph.complete(6)


@pytest.fixture(scope='session')
def square_path():
    return UTILS_PATH / 'square.txt'


@pytest.fixture(scope='session')
def graph6_path():
    return UTILS_PATH / 'k5_graph6.txt'
