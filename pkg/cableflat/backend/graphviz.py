from io import BytesIO

import graphviz
import matplotlib.image as mpimg
import matplotlib.pyplot as plt
from matplotlib.colors import to_hex

from cableflat.backend.base import BaseBackend
from cableflat.graph.topology import GROUND, Topology

SHAPES = {"ground": "box", "mass": "circle", "robot": "triangle"}
SHADES = {"ground": 0.5, "mass": 0.1, "robot": 0.9}


class GraphvizBackend(BaseBackend):
    def plot(self, *args, **kwargs):
        dot = args[0]
        dot_str = graphviz.pipe(engine="dot", format="png", data=dot.source.encode())
        # treat the dot output string as an image file
        sio = BytesIO()
        sio.write(dot_str)
        sio.seek(0)
        fig, ax = plt.subplots(
            figsize=(
                self.figure_dimensions[0] / self.dpi,
                self.figure_dimensions[1] / self.dpi,
            ),
            dpi=self.dpi,
        )
        ax.axis("off")
        ax.imshow(mpimg.imread(sio), aspect="equal")
        fig.tight_layout()
        plt.show()

    def save_to_file(self, *args, **kwargs):
        dot = args[0]
        filename = kwargs.pop("filename", "topology")
        return dot.render(
            engine="dot",
            format=self.format.lstrip("."),
            filepath=self.output_dir / filename,
        )

    def topology_graph(self, topology: Topology, **kwargs) -> graphviz.Graph:
        r"""Schematic of the cable: ground anchor, point masses and robots joined by segments"""
        dot = graphviz.Graph(name=kwargs.pop("name", "topology"))
        dot.graph_attr["dpi"] = str(self.dpi)
        dot.graph_attr["rankdir"] = "LR"
        dot.graph_attr["label"] = repr(topology)
        cmap = plt.get_cmap("coolwarm")
        for node, attrs in sorted(topology.nodes.items()):
            kind = attrs["kind"]
            color = (*cmap(SHADES[kind])[:3], 0.7)
            dot.node(
                str(node),
                label="ground" if node == GROUND else "{}{}".format(
                    "R" if kind == "robot" else "m", node
                ),
                shape=SHAPES[kind],
                fillcolor=to_hex(color, keep_alpha=True),
                style="filled",
            )
        for u, v, attrs in sorted(topology.edges(data=True), key=lambda e: e[2]["segment"]):
            dot.edge(str(min(u, v)), str(max(u, v)), label="l{}".format(attrs["segment"]))
        return dot

    def plot_topology(self, topology: Topology, **kwargs):
        name = kwargs.get("name", "topology")
        dot = self.topology_graph(topology, **kwargs)
        if self.format is None:
            return self.plot(dot)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.save_to_file(dot, filename=name)
