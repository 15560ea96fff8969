import numpy as np
import pandas as pd
import pytest
from cableflat.model.params import CableParams
from cableflat.sysid.dataset import MocapDataset, position_columns, synthetic_dataset
from cableflat.sysid.identify import ThetaVector


@pytest.fixture(scope="module")
def truth() -> CableParams:
    r"""Four-point cable held at both ends:

        R1 --- m2 --- m3 --- R4
    """
    return CableParams(n=4, k=[20.0, 25.0, 20.0], l0=[0.2, 0.2, 0.2], mass=0.002, c=0.001)


@pytest.fixture(scope="module")
def recording(truth: CableParams) -> MocapDataset:
    return synthetic_dataset(truth, duration=8.0, rate=100.0, amplitude=0.1, seed=3)


@pytest.fixture
def truth_theta(truth: CableParams) -> ThetaVector:
    return ThetaVector(k=truth.k, c=0.001)


@pytest.fixture
def markers() -> pd.DataFrame:
    r"""Three markers moving along x at 1 m/s, sampled at 10 Hz.

    Point ``i`` sits at ``(t + 0.1 (i - 1), 0, 1)``.
    """
    times = np.arange(20) / 10.0
    positions = np.zeros((20, 3, 3))
    positions[:, :, 0] = times[:, None] + 0.1 * np.arange(3)
    positions[:, :, 2] = 1.0
    frame = pd.DataFrame(positions.reshape(20, 9), columns=position_columns(3))
    frame.insert(0, "t", times)
    return frame
