import copy
from typing import Dict

import pytest
from cableflat.parse.utilities import load_json


@pytest.fixture
def document() -> Dict:
    r"""Ground-anchored scenario document:

        ground --- m1 --- m2 --- R3
    """
    return copy.deepcopy(load_json("scenarios/a1_circle"))
