import math

import pytest

from tricklefair import Topology, generate_grid

GRID_RANGE = math.sqrt(2.0)


@pytest.fixture(scope="session")
def grid():
    """The 7x7 unit-spacing grid with diagonal links (degrees 3/5/8)."""
    return generate_grid(7, 7, 1.0, GRID_RANGE)


@pytest.fixture(scope="session")
def two_node():
    return Topology.from_edges(2, [(0, 1)])
