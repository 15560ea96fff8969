from cableflat.errors import InvalidConfig

BACKENDS = ("matplotlib", "graphviz")


def get_backend(name: str):
    if name == "matplotlib":
        from .matplotlib import MatplotlibBackend

        return MatplotlibBackend
    elif name == "graphviz":
        from .graphviz import GraphvizBackend

        return GraphvizBackend
    else:
        raise InvalidConfig("backend '{}' is not supported".format(name))
