import pytest
from cableflat.graph.topology import Topology


@pytest.fixture
def anchored() -> Topology:
    r"""Class A cable of three points, the last one carried by a robot:

        ground --- m1 --- m2 --- R3
    """
    return Topology.build("A", 3, [3])


@pytest.fixture
def free_end() -> Topology:
    r"""Class B cable of five points with robots on points 2 and 5:

        m1 --- R2 --- m3 --- m4 --- R5
    """
    return Topology.build("B", 5, [2, 5])


@pytest.fixture
def both_ends() -> Topology:
    r"""Class C cable of six points held at both ends:

        R1 --- m2 --- m3 --- m4 --- m5 --- R6
    """
    return Topology.build("C", 6, [1, 6])


@pytest.fixture
def three_robots() -> Topology:
    r"""Class C cable of seven points with a robot in the middle:

        R1 --- m2 --- m3 --- R4 --- m5 --- m6 --- R7
    """
    return Topology.build("C", 7, [1, 4, 7])
