from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Tuple, Union

from cableflat.errors import InvalidConfig
from cableflat.graph.topology import Topology


class BaseBackend(ABC):
    def __init__(
        self,
        output_dir: Union[str, Path],
        format: Optional[str] = None,
        figure_dimensions: Tuple[float, float] = (1280, 960),
        dpi: int = 100,
    ) -> None:
        self.output_dir = Path(output_dir)
        self.format = format
        self.figure_dimensions = figure_dimensions
        self.dpi = dpi

    @property
    def name(self) -> str:
        return type(self).__name__.replace("Backend", "").lower()

    @abstractmethod
    def plot(self, *args, **kwargs):
        raise NotImplementedError

    @abstractmethod
    def save_to_file(self, *args, **kwargs):
        raise NotImplementedError

    def show_or_save(self, figure, filename: str):
        if self.format is None:
            return self.plot(figure)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.save_to_file(figure, filename=filename)

    @abstractmethod
    def plot_topology(self, topology: Topology, **kwargs):
        raise NotImplementedError

    def plot_output_errors(self, log, **kwargs):
        raise InvalidConfig("the {} backend cannot draw time series".format(self.name))

    def plot_trajectory(self, positions, times, topology: Topology, **kwargs):
        raise InvalidConfig("the {} backend cannot draw time series".format(self.name))

    def plot_identification_errors(self, report, **kwargs):
        raise InvalidConfig("the {} backend cannot draw time series".format(self.name))
