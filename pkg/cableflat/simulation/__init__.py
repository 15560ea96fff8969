from .integrator import rk4_step  # noqa
