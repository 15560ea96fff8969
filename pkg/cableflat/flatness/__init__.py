from .jet import Jet  # noqa
