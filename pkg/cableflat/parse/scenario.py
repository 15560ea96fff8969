r"""Scenario documents: everything needed to plan and simulate one experiment."""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from cableflat.control.feedback import ClosedLoopController, GainConfig
from cableflat.errors import InvalidConfig, SchemaError
from cableflat.flatness.planner import BRANCHES, FlatOutputs, PlannedTrajectory, plan
from cableflat.graph.topology import Topology
from cableflat.model.params import CableParams, QuadParams
from cableflat.parse.flat import FlatOutputParser, flat_outputs_to_dict
from cableflat.parse.utilities import check_keys, document_hash, fixture_path, load_json
from cableflat.simulation.simulator import SimConfig, default_outputs

__all__ = ["Perturbation", "TimeGrid", "ScenarioFile", "ScenarioParser"]

logger = logging.getLogger(__name__)

SCENARIO_KEYS = (
    "name",
    "description",
    "topology",
    "cable",
    "quads",
    "flat_outputs",
    "times",
    "branch",
    "depth",
    "simulation",
    "perturbation",
    "controller",
)
REQUIRED_KEYS = ("topology", "cable", "flat_outputs", "times")
DEFAULT_QUADS = "quad_generic"


@dataclass(frozen=True)
class Perturbation:
    r"""Mismatch between the planning model and the simulated plant, as scale factors"""

    k_scale: float = 1.0
    c_scale: float = 1.0
    mass_scale: float = 1.0

    def __post_init__(self) -> None:
        if min(self.k_scale, self.c_scale, self.mass_scale) <= 0:
            raise InvalidConfig("perturbation factors must be positive")

    @property
    def is_identity(self) -> bool:
        return self.k_scale == self.c_scale == self.mass_scale == 1.0

    def apply(self, cable: CableParams) -> CableParams:
        return cable.scaled(mass=self.mass_scale, k=self.k_scale, c=self.c_scale)

    @classmethod
    def from_dict(cls, data: Dict) -> "Perturbation":
        check_keys(data, (), ("k_scale", "c_scale", "mass_scale"), "perturbation")
        return cls(**data)


@dataclass(frozen=True)
class TimeGrid:
    duration: float
    step: float = 0.01
    start: float = 0.0

    def __post_init__(self) -> None:
        if not self.step > 0 or self.duration < 0:
            raise InvalidConfig("time grid needs a positive step and a non-negative duration")

    def samples(self) -> np.ndarray:
        count = int(round(self.duration / self.step)) + 1
        return self.start + self.step * np.arange(count)

    @classmethod
    def from_dict(cls, data: Dict) -> "TimeGrid":
        check_keys(data, ("duration",), ("step", "start"), "times")
        return cls(**data)


@dataclass(frozen=True)
class ScenarioFile:
    r"""A parsed scenario document.

    ``cable`` is the planning model; the simulated plant is ``cable`` with the
    perturbation applied.
    """

    name: str
    topology: Topology
    cable: CableParams
    quads: List[QuadParams]
    flat: FlatOutputs
    times: TimeGrid
    simulation: SimConfig = field(default_factory=SimConfig)
    branch: str = "tension"
    depth: Optional[int] = None
    perturbation: Perturbation = field(default_factory=Perturbation)
    controller: Optional[GainConfig] = None
    description: str = ""

    @property
    def plant(self) -> CableParams:
        return self.perturbation.apply(self.cable)

    @property
    def outputs(self):
        if self.simulation.outputs is not None:
            return self.simulation.outputs
        return default_outputs(self.topology, self.flat.pair)

    def plan(self) -> PlannedTrajectory:
        logger.info("planning scenario '%s' on %s", self.name, self.topology)
        return plan(
            self.flat,
            self.topology,
            self.cable,
            self.quads,
            self.times.samples(),
            depth=self.depth,
            branch=self.branch,
        )

    def closed_loop_controller(self) -> ClosedLoopController:
        return ClosedLoopController(
            self.flat,
            self.topology,
            self.cable,
            self.quads,
            self.controller or GainConfig(),
            self.branch,
        )

    def with_simulation(self, **changes) -> "ScenarioFile":
        return replace(self, simulation=self.simulation.replace(**changes))

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "description": self.description,
            "topology": self.topology.to_dict(),
            "cable": self.cable.to_dict(),
            "quads": [q.to_dict() for q in self.quads],
            "flat_outputs": flat_outputs_to_dict(self.flat),
            "times": {
                "duration": self.times.duration,
                "step": self.times.step,
                "start": self.times.start,
            },
            "branch": self.branch,
            "depth": self.depth,
            "simulation": self.simulation.to_dict(),
            "perturbation": {
                "k_scale": self.perturbation.k_scale,
                "c_scale": self.perturbation.c_scale,
                "mass_scale": self.perturbation.mass_scale,
            },
            "controller": None if self.controller is None else self.controller.to_dict(),
        }

    @property
    def hash(self) -> str:
        return document_hash(self.to_dict())


class ScenarioParser:
    r"""Strict reader of scenario documents.

    Cable and robot parameters are given inline or as the name of a parameter
    document, looked up next to the scenario first and then in the fixtures.
    """

    def __init__(self) -> None:
        self.base: Optional[Path] = None

    def _document(self, value, what: str) -> Dict:
        if isinstance(value, dict):
            return value
        if isinstance(value, str):
            if self.base is not None:
                for candidate in (self.base / value, self.base / (value + ".json")):
                    if candidate.exists():
                        return load_json(candidate)
            try:
                return load_json(value)
            except FileNotFoundError:
                raise SchemaError("{} document '{}' not found".format(what, value))
        raise SchemaError("{} must be an object or a document name".format(what))

    def parse_quads(self, value, topology: Topology) -> List[QuadParams]:
        if value is None:
            value = DEFAULT_QUADS
        entries = value if isinstance(value, list) else [value]
        quads = [QuadParams.from_dict(self._document(q, "quads")) for q in entries]
        if len(quads) == 1:
            quads = quads * topology.n_robots
        if len(quads) != topology.n_robots:
            raise SchemaError(
                "{} robot parameter sets for {} robots".format(len(quads), topology.n_robots)
            )
        return [q.attached_to(j) for q, j in zip(quads, topology.robots)]

    def parse_document(self, data: Dict, name: str = "scenario") -> ScenarioFile:
        optional = [k for k in SCENARIO_KEYS if k not in REQUIRED_KEYS]
        check_keys(data, REQUIRED_KEYS, optional, "scenario")
        topology_data = data["topology"]
        check_keys(topology_data, ("class", "n", "robots"), (), "topology")
        topology = Topology.from_dict(topology_data)
        cable = CableParams.from_dict(self._document(data["cable"], "cable"))
        cable.check(topology)
        branch = data.get("branch", "tension")
        if branch not in BRANCHES:
            raise SchemaError("branch must be one of {}".format(BRANCHES))
        controller = data.get("controller")
        return ScenarioFile(
            name=data.get("name", name),
            description=data.get("description", ""),
            topology=topology,
            cable=cable,
            quads=self.parse_quads(data.get("quads"), topology),
            flat=FlatOutputParser(topology).parse(data["flat_outputs"]),
            times=TimeGrid.from_dict(data["times"]),
            simulation=SimConfig.from_dict(data.get("simulation", {})),
            branch=branch,
            depth=data.get("depth"),
            perturbation=Perturbation.from_dict(data.get("perturbation", {})),
            controller=None if controller is None else GainConfig.from_dict(controller),
        )

    def parse(self, path: Union[str, Path]) -> ScenarioFile:
        document = load_json(path)
        if not document:
            raise SchemaError("scenario '{}' is empty".format(path))
        self.base = fixture_path(path).resolve().parent
        return self.parse_document(document, name=Path(path).stem)
