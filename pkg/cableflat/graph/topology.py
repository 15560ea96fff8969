from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx
from networkx import Graph

from cableflat.errors import InvalidConfig

__all__ = ["Topology", "SYSTEM_CLASSES"]

SYSTEM_CLASSES = ("A", "B", "C")
GROUND = 0


class Topology(Graph):
    r"""Cable topology as an undirected path graph.

    Nodes ``1..n`` are the point masses, node ``0`` is the ground anchor of class
    A systems. Each edge is a spring segment and carries its index ``segment``:
    edge ``(i, i+1)`` is segment ``i``, edge ``(0, 1)`` is the ground segment 0.
    Instances returned by :meth:`build` are frozen.
    """

    @classmethod
    def build(cls, system_class: str, n: int, robots: Iterable[int]) -> "Topology":
        system_class = str(system_class).upper()
        robots = tuple(sorted(int(j) for j in robots))
        if system_class not in SYSTEM_CLASSES:
            raise InvalidConfig(
                "system class must be one of {}, got '{}'".format(
                    SYSTEM_CLASSES, system_class
                )
            )
        if n < 1:
            raise InvalidConfig("a cable needs at least one point mass")
        if len(robots) == 0:
            raise InvalidConfig("at least one robot is required")
        if len(set(robots)) != len(robots):
            raise InvalidConfig("robot indices must be unique")
        if robots[0] < 1 or robots[-1] > n:
            raise InvalidConfig("robot indices must lie in 1..{}".format(n))
        if system_class in ("A", "B") and n not in robots:
            raise InvalidConfig(
                "class {} requires a robot on the last mass {}".format(system_class, n)
            )
        if system_class == "C" and (1 not in robots or n not in robots or n < 2):
            raise InvalidConfig("class C requires robots on both cable ends")

        graph = cls()
        graph.graph["system_class"] = system_class
        graph.graph["robots"] = robots
        robot_set = set(robots)
        if system_class == "A":
            graph.add_node(GROUND, kind="ground")
        for i in range(1, n + 1):
            graph.add_node(i, kind="robot" if i in robot_set else "mass")
        if system_class == "A":
            graph.add_edge(GROUND, 1, segment=0)
        for i in range(1, n):
            graph.add_edge(i, i + 1, segment=i)
        return nx.freeze(graph)

    @classmethod
    def from_dict(cls, data: Dict) -> "Topology":
        return cls.build(data["class"], int(data["n"]), data["robots"])

    def to_dict(self) -> Dict:
        return {"class": self.system_class, "n": self.n, "robots": list(self.robots)}

    @property
    def system_class(self) -> str:
        return self.graph["system_class"]

    @property
    def robots(self) -> Tuple[int, ...]:
        return self.graph["robots"]

    @property
    def n(self) -> int:
        return sum(1 for node in self.nodes if node != GROUND)

    @property
    def n_robots(self) -> int:
        return len(self.robots)

    @property
    def has_anchor(self) -> bool:
        return self.system_class == "A"

    @property
    def free_masses(self) -> Tuple[int, ...]:
        return tuple(
            i for i in range(1, self.n + 1) if self.nodes[i]["kind"] == "mass"
        )

    @property
    def segments(self) -> List[int]:
        return sorted(data["segment"] for _, _, data in self.edges(data=True))

    def is_robot(self, i: int) -> bool:
        return self.nodes[i]["kind"] == "robot"

    def robot_slot(self, j: int) -> int:
        return self.robots.index(j)

    def output_pairs(self) -> List[Tuple[int, int]]:
        r"""Consecutive free-mass pairs usable as the class C flat pair"""
        free = set(self.free_masses)
        return [(i, i + 1) for i in range(1, self.n) if i in free and i + 1 in free]

    def outward_chains(self, pair: Tuple[int, int]) -> Tuple[List[int], List[int]]:
        r"""Split the cable at the segment joining ``pair``.

        Returns:
            The masses on the decreasing side (ordered away from the pair) and
            the masses on the increasing side (ordered away from the pair)
        """
        i, i_next = pair
        if not self.has_edge(i, i_next):
            raise InvalidConfig("{} is not a cable segment".format(pair))
        view = nx.restricted_view(self, [], [(i, i_next)])
        lower = sorted(
            (node for node in nx.node_connected_component(view, i) if node != GROUND),
            reverse=True,
        )
        upper = sorted(nx.node_connected_component(view, i_next))
        return lower, upper

    def flat_targets(self, pair: Optional[Tuple[int, int]] = None) -> List[str]:
        r"""Names of the flat-output channels the planner consumes.

        Args:
            pair: Class C only, the consecutive free masses used as outputs

        Returns:
            Position targets ``p<i>`` followed by yaw targets ``yaw<j>``
        """
        robots = self.robots
        n = self.n
        if self.system_class in ("A", "B"):
            positions = [1] + [j + 1 for j in robots if j != n]
        else:
            if pair is None:
                raise InvalidConfig("class C flat outputs need the output pair")
            if pair not in self.output_pairs():
                raise InvalidConfig(
                    "output pair {} must be consecutive masses without robots".format(
                        pair
                    )
                )
            i = pair[0]
            positions = [i, i + 1]
            positions += [j + 1 for j in robots if j > i and j != n]
            positions += [k - 1 for k in robots if k < i and k != 1]
        positions = sorted(positions)
        return ["p{}".format(i) for i in positions] + [
            "yaw{}".format(j) for j in robots
        ]

    def layout(self) -> Dict[int, Tuple[float, float]]:
        r"""Schematic coordinates used by the plotting back ends"""
        positions = {}
        for node in self.nodes:
            if node == GROUND:
                positions[node] = (0.0, -1.0)
            elif self.is_robot(node):
                positions[node] = (float(node), 1.0)
            else:
                positions[node] = (float(node), 0.0)
        return positions

    def __repr__(self) -> str:
        return "Topology(class={}, n={}, robots={})".format(
            self.system_class, self.n, list(self.robots)
        )
