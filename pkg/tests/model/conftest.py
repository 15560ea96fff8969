import numpy as np
import pytest
from cableflat.graph.topology import Topology
from cableflat.model.params import CableParams, QuadParams


@pytest.fixture
def table1() -> CableParams:
    return CableParams.load("table1")


@pytest.fixture
def quad() -> QuadParams:
    return QuadParams.load("quad_generic")


@pytest.fixture
def hanging() -> Topology:
    r"""Class B cable of three points hanging below a single robot:

        R3
        |
        m2
        |
        m1
    """
    return Topology.build("B", 3, [3])


@pytest.fixture
def hanging_params() -> CableParams:
    r"""Table cable masses with the stiffest segment at the top of the chain"""
    return CableParams(
        n=3,
        k=[5.411, 11.312],
        l0=[0.1942, 0.1950],
        mass=np.full(3, 1.16e-3),
        c=np.full(3, 0.002),
    )
