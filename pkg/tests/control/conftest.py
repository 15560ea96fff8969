import numpy as np
import pytest
from cableflat.flatness.planner import plan
from cableflat.parse.scenario import ScenarioFile, ScenarioParser


@pytest.fixture
def c1() -> ScenarioFile:
    r"""Eight-shaped flight of the middle pair with integral feedback:

        R1 --- m2 --- m3 ~~~ m4 --- m5 --- R6

    Points 3 and 4 are the outputs; the feedback shifts points 2 and 5.
    """
    return ScenarioParser().parse("scenarios/c1_closed_loop")


@pytest.fixture
def on_plan(c1: ScenarioFile) -> np.ndarray:
    r"""Planned positions of every point at t = 0"""
    return plan(c1.flat, c1.topology, c1.cable, c1.quads, np.array([0.0])).positions[0]
