import numpy as np
import pytest
from cableflat.flatness.planner import PlannedTrajectory, plan
from cableflat.graph.topology import Topology
from cableflat.model.params import CableParams
from cableflat.parse.scenario import ScenarioFile, ScenarioParser
from cableflat.simulation.simulator import SimLog


@pytest.fixture
def hanging() -> Topology:
    r"""Short cable hanging from a single robot:

        m1 --- m2 --- R3
    """
    return Topology.build("B", 3, [3])


@pytest.fixture
def springy() -> CableParams:
    return CableParams(n=3, k=[5.0, 5.0], l0=[0.3, 0.3], mass=0.01, c=0.0)


@pytest.fixture
def a1() -> ScenarioFile:
    return ScenarioParser().parse("scenarios/a1_circle")


@pytest.fixture
def a1_plan(a1: ScenarioFile) -> PlannedTrajectory:
    times = np.linspace(0.0, 1.0, 101)
    return plan(a1.flat, a1.topology, a1.cable, a1.quads, times)


@pytest.fixture
def offset_log() -> SimLog:
    r"""Two-point log whose first point drifts away from its reference.

    Distances to the reference are 0, 0.1, 0.2 and 0.3 at t = 0, 1, 2, 3.
    """
    times = np.arange(4.0)
    positions = np.zeros((4, 2, 3))
    references = np.full((4, 2, 3), np.nan)
    references[:, 0] = [[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.3]]
    return SimLog(
        times=times,
        positions=positions,
        velocities=np.zeros_like(positions),
        forces=np.zeros((4, 3, 3)),
        references=references,
        outputs=(1,),
        metadata={"mode": "tracked"},
    )
