import inspect
from typing import Dict, Optional

from cableflat.errors import SchemaError
from cableflat.flatness.planner import FlatOutputs
from cableflat.flatness.primitives import PRIMITIVES, Constant, Primitive
from cableflat.parse.utilities import check_keys


class FlatOutputParser:
    r"""Builds :class:`FlatOutputs` from their JSON description.

    A channel is an object naming its ``primitive`` kind plus the constructor
    arguments of that primitive; ``sum`` channels list their ``terms``. Robot yaw
    channels that are not given are held at zero.
    """

    def __init__(self, topology) -> None:
        self.topology = topology

    def parse_primitive(self, data: Dict, name: str = "channel") -> Primitive:
        if not isinstance(data, dict) or "primitive" not in data:
            raise SchemaError("{} must be an object with a 'primitive' kind".format(name))
        kind = data["primitive"]
        if kind not in PRIMITIVES:
            raise SchemaError(
                "{}: unknown primitive '{}', expected one of {}".format(
                    name, kind, sorted(PRIMITIVES)
                )
            )
        cls = PRIMITIVES[kind]
        arguments = {k: v for k, v in data.items() if k != "primitive"}
        if cls is PRIMITIVES["sum"]:
            check_keys(arguments, ("terms",), (), name)
            return cls(
                [
                    self.parse_primitive(term, "{}.terms[{}]".format(name, position))
                    for position, term in enumerate(arguments["terms"])
                ]
            )
        parameters = inspect.signature(cls.__init__).parameters
        names = [p for p in parameters if p != "self"]
        required = [p for p in names if parameters[p].default is inspect.Parameter.empty]
        check_keys(arguments, required, [p for p in names if p not in required], name)
        return cls(**arguments)

    def parse(self, data: Dict) -> FlatOutputs:
        check_keys(data, ("channels",), ("pair",), "flat outputs")
        channels = {
            name: self.parse_primitive(spec, name) for name, spec in data["channels"].items()
        }
        for j in self.topology.robots:
            channels.setdefault("yaw{}".format(j), Constant(0.0))
        pair: Optional[tuple] = None
        if data.get("pair") is not None:
            pair = tuple(int(i) for i in data["pair"])
        flat = FlatOutputs(channels=channels, pair=pair)
        flat.validate(self.topology)
        return flat


def flat_outputs_to_dict(flat: FlatOutputs) -> Dict:
    data = {"channels": {name: p.to_dict() for name, p in flat.channels.items()}}
    if flat.pair is not None:
        data["pair"] = list(flat.pair)
    return data
