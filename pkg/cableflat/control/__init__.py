from .feedback import ClosedLoopController, GainConfig, IntegralState  # noqa
