import numpy as np
import pytest
from cableflat.model.params import CableParams
from cableflat.parse.scenario import ScenarioFile, ScenarioParser


@pytest.fixture
def times() -> np.ndarray:
    return np.linspace(0.0, 3.0, 31)


@pytest.fixture
def a1() -> ScenarioFile:
    r"""Ground-anchored cable following a circle:

        ground --- m1 --- m2 --- R3
    """
    return ScenarioParser().parse("scenarios/a1_circle")


@pytest.fixture
def b() -> ScenarioFile:
    r"""Cable with a free end carried by two robots:

        m1 --- R2 --- m3 --- m4 --- R5
    """
    return ScenarioParser().parse("scenarios/b_polynomial")


@pytest.fixture
def c1() -> ScenarioFile:
    r"""Cable held at both ends, the middle pair drawing an eight:

        R1 --- m2 --- m3 --- m4 --- m5 --- R6
    """
    return ScenarioParser().parse("scenarios/c1_eight_literal")


@pytest.fixture
def zero_force() -> ScenarioFile:
    return ScenarioParser().parse("scenarios/zero_force")


@pytest.fixture
def chain() -> CableParams:
    return CableParams(n=3, k=[10.0, 10.0], l0=[0.5, 0.5], mass=[0.1, 0.2, 0.3], c=[0.0, 0.05, 0.0])
