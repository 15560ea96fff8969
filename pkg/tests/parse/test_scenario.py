import json
from pathlib import Path
from typing import Dict

import numpy as np
import pytest
from cableflat.errors import FlatOutputMismatch, InvalidConfig, SchemaError
from cableflat.flatness.primitives import Constant, Sum
from cableflat.parse.scenario import ScenarioParser, TimeGrid
from cableflat.parse.utilities import FIXTURES

SCENARIOS = sorted(p.stem for p in (FIXTURES / "scenarios").glob("*.json"))


@pytest.mark.parametrize("name", SCENARIOS)
def test_shipped_scenarios_parse(name: str) -> None:
    scenario = ScenarioParser().parse("scenarios/{}".format(name))
    assert scenario.name == name
    assert len(scenario.quads) == scenario.topology.n_robots
    assert [q.attach for q in scenario.quads] == list(scenario.topology.robots)


def test_scenario_round_trip() -> None:
    scenario = ScenarioParser().parse("scenarios/c1_closed_loop")
    again = ScenarioParser().parse_document(scenario.to_dict())
    assert again.hash == scenario.hash
    assert isinstance(again.flat.channels["p3"], Sum)


def test_plant_perturbation() -> None:
    scenario = ScenarioParser().parse("scenarios/c1_closed_loop")
    assert scenario.plant.k == pytest.approx(0.7 * scenario.cable.k)
    assert scenario.plant.mass == pytest.approx(scenario.cable.mass)
    assert scenario.controller.K == (0.2, 0.2, 0.2)
    assert scenario.outputs == (3, 4)


def test_yaw_channels_default_to_zero() -> None:
    scenario = ScenarioParser().parse("scenarios/b_polynomial")
    assert set(scenario.flat.channels) == {"p1", "p3", "yaw2", "yaw5"}
    assert isinstance(scenario.flat.channels["yaw5"], Constant)
    assert np.allclose(scenario.flat.channels["yaw5"](np.array([3.0])), 0.0)


def test_quads_default(document: Dict) -> None:
    del document["quads"]
    scenario = ScenarioParser().parse_document(document)
    assert scenario.quads[0].m_R == pytest.approx(0.5)
    assert scenario.quads[0].attach == 3


def test_inline_parameters(document: Dict) -> None:
    document["quads"] = [{"m_R": 0.03, "J": [1.4e-5, 1.4e-5, 2.2e-5]}]
    document["cable"] = {"n": 3, "k": [1.0, 2.0, 3.0], "l0": [1.0, 0.3, 0.3], "mass": 0.01, "c": 0.0}
    scenario = ScenarioParser().parse_document(document)
    assert scenario.quads[0].m_R == pytest.approx(0.03)
    assert scenario.cable.stiffness[2] == pytest.approx(3.0)


def break_key(document: Dict) -> Dict:
    document["colour"] = "red"
    return document


def drop(key: str):
    def change(document: Dict) -> Dict:
        del document[key]
        return document

    return change


def set_value(path, value):
    def change(document: Dict) -> Dict:
        target = document
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = value
        return document

    return change


@pytest.mark.parametrize(
    "change",
    [
        break_key,
        drop("times"),
        drop("flat_outputs"),
        set_value(["branch"], "slack"),
        set_value(["cable"], "no_such_cable"),
        set_value(["cable"], 3),
        set_value(["quads"], ["quad_generic", "quad_generic"]),
        set_value(["topology", "kind"], "A"),
        set_value(["flat_outputs", "channels", "p1", "primitive"], "spline"),
        set_value(["flat_outputs", "channels", "p1", "speed"], 1.0),
        set_value(["flat_outputs", "channels", "yaw3"], {"value": 0.0}),
        set_value(["simulation", "solver"], "euler"),
        set_value(["perturbation"], {"k": 0.7}),
        set_value(["controller"], {"gain": 0.1}),
        set_value(["times"], {"step": 0.01}),
    ],
)
def test_strict_documents(document: Dict, change) -> None:
    with pytest.raises(SchemaError):
        ScenarioParser().parse_document(change(document))


@pytest.mark.parametrize(
    "change",
    [
        set_value(["cable", "n"], 4),
        set_value(["topology", "robots"], [4]),
        set_value(["perturbation"], {"k_scale": 0.0}),
        set_value(["times", "step"], 0.0),
    ],
)
def test_inconsistent_documents(document: Dict, change) -> None:
    with pytest.raises(InvalidConfig):
        ScenarioParser().parse_document(change(document))


def test_pair_on_an_anchored_cable(document: Dict) -> None:
    document["flat_outputs"]["pair"] = [1, 2]
    with pytest.raises(FlatOutputMismatch):
        ScenarioParser().parse_document(document)


def test_empty_scenario(tmp_path: Path) -> None:
    path = tmp_path / "empty.json"
    path.write_text("{}")
    with pytest.raises(SchemaError):
        ScenarioParser().parse(path)


def test_parameter_documents_next_to_the_scenario(document: Dict, tmp_path: Path) -> None:
    (tmp_path / "light.json").write_text(json.dumps({"m_R": 0.1, "J": [1e-4, 1e-4, 2e-4]}))
    document["quads"] = "light"
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(document))
    scenario = ScenarioParser().parse(path)
    assert scenario.name == "a1_circle"
    assert scenario.quads[0].m_R == pytest.approx(0.1)


def test_time_grid() -> None:
    assert TimeGrid(1.0).samples() == pytest.approx(np.linspace(0.0, 1.0, 101))
    assert TimeGrid(0.5, 0.25, 2.0).samples() == pytest.approx([2.0, 2.25, 2.5])
