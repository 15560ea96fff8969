from .params import GRAVITY, CableParams, QuadParams  # noqa
