import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from cableflat.backend.base import BaseBackend
from cableflat.graph.topology import GROUND, Topology
from cableflat.simulation.simulator import AXES, SimLog


class MatplotlibBackend(BaseBackend):
    def plot(self, *args, **kwargs):
        fig = args[0]
        fig.tight_layout()
        plt.show()

    def save_to_file(self, *args, **kwargs):
        fig = args[0]
        filename = kwargs.pop("filename", "figure")
        fig.tight_layout()
        output_file = (self.output_dir / filename).with_suffix("." + self.format.lstrip("."))
        fig.savefig(output_file)
        plt.close(fig)
        return output_file

    def _figure(self, rows: int = 1, columns: int = 1, **kwargs):
        return plt.subplots(
            rows,
            columns,
            figsize=(
                self.figure_dimensions[0] / self.dpi,
                self.figure_dimensions[1] / self.dpi,
            ),
            dpi=self.dpi,
            squeeze=False,
            **kwargs
        )

    def plot_output_errors(self, log: SimLog, **kwargs):
        name = kwargs.pop("name", "{}_outputs".format(log.metadata.get("name", "run")))
        outputs = list(log.outputs)
        fig, axes = self._figure(len(AXES) + 1, 1, sharex=True)
        cmap = plt.get_cmap("coolwarm")
        colors = [cmap(x) for x in np.linspace(0.1, 0.9, max(len(outputs), 2))]
        for color, i in zip(colors, outputs):
            actual = log.positions[:, i - 1]
            desired = log.references[:, i - 1]
            for a, axis in enumerate(AXES):
                ax = axes[a, 0]
                ax.plot(log.times, desired[:, a], color=color, linestyle="--", alpha=0.7)
                ax.plot(log.times, actual[:, a], color=color, label="p{}".format(i))
                ax.set_ylabel("{} [m]".format(axis))
            error = np.linalg.norm(actual - desired, axis=-1)
            axes[-1, 0].plot(log.times, error, color=color, label="p{}".format(i))
        axes[0, 0].legend(loc="upper right")
        axes[-1, 0].set_ylabel("error [m]")
        axes[-1, 0].set_xlabel("t [s]")
        axes[0, 0].set_title("{}: outputs (solid), references (dashed)".format(name))
        return self.show_or_save(fig, filename=name)

    def plot_trajectory(self, positions, times, topology: Topology, **kwargs):
        r"""Paths of every mass in the x-z plane with the cable drawn at a few instants"""
        name = kwargs.pop("name", "trajectory")
        snapshots = kwargs.pop("snapshots", 5)
        positions = np.asarray(positions)
        fig, axes = self._figure()
        ax = axes[0, 0]
        cmap = plt.get_cmap("coolwarm")
        for i in range(1, topology.n + 1):
            style = "-" if topology.is_robot(i) else ":"
            ax.plot(
                positions[:, i - 1, 0],
                positions[:, i - 1, 2],
                style,
                color=cmap((i - 1) / max(topology.n - 1, 1)),
                alpha=0.7,
                label="p{}".format(i),
            )
        samples = np.linspace(0, len(times) - 1, snapshots).astype(int)
        segments = [positions[s][:, [0, 2]] for s in samples]
        ax.add_collection(LineCollection(segments, colors="k", linewidths=1, zorder=2))
        for s in samples:
            ax.scatter(positions[s, :, 0], positions[s, :, 2], s=10, color="k", zorder=3)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("z [m]")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend(loc="upper right", fontsize="small")
        ax.set_title(
            "{} ({:.1f} s to {:.1f} s)".format(name, float(times[0]), float(times[-1]))
        )
        return self.show_or_save(fig, filename=name)

    def plot_topology(self, topology: Topology, **kwargs):
        name = kwargs.pop("name", "topology")
        fig, axes = self._figure()
        ax = axes[0, 0]
        ax.axis("off")
        layout = topology.layout()
        cable = [layout[i] for i in sorted(layout) if i != GROUND]
        edges = [(layout[u], layout[v]) for u, v in topology.edges]
        ax.add_collection(LineCollection(edges, colors="k", zorder=1))
        cmap = plt.get_cmap("coolwarm")
        for node, (x, y) in layout.items():
            kind = topology.nodes[node]["kind"]
            marker = {"ground": "s", "robot": "^", "mass": "o"}[kind]
            color = cmap({"ground": 0.5, "robot": 0.9, "mass": 0.1}[kind])
            ax.scatter([x], [y], s=200, marker=marker, color=color, alpha=0.7, zorder=2)
            ax.annotate(
                "G" if node == GROUND else str(node), (x, y), ha="center", va="center"
            )
        xs = [x for x, _ in cable]
        ax.set_xlim(min(xs + [0.0]) - 0.5, max(xs) + 0.5)
        ax.set_ylim(-1.5, 1.5)
        ax.set_title(repr(topology))
        return self.show_or_save(fig, filename=name)

    def plot_identification_errors(self, report, **kwargs):
        name = kwargs.pop("name", "identification")
        fig, axes = self._figure()
        ax = axes[0, 0]
        cmap = plt.get_cmap("coolwarm")
        count = max(len(report.interior), 2)
        for slot, i in enumerate(report.interior):
            ax.plot(
                report.times,
                report.errors[:, slot],
                color=cmap(slot / (count - 1)),
                label="p{}".format(i),
            )
        ax.set_xlabel("t [s]")
        ax.set_ylabel("prediction error [m]")
        ax.legend(loc="upper right")
        ax.set_title(
            "mean coordinate error {:.3g} m".format(report.mean_coordinate_error)
        )
        return self.show_or_save(fig, filename=name)
