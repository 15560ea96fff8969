from .topology import Topology  # noqa
