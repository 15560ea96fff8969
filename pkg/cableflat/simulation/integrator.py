r"""Classical fixed-step Runge-Kutta integration of :class:`SystemState`.

Translational states are combined linearly; attitudes move on SO(3) through the
exponential map, ``R <- R exp(h hat(omega))``, at every stage and in the final
update, and are re-orthonormalised after each full step.
"""
from typing import Callable, Optional

import numpy as np

from cableflat.errors import InvalidConfig, NonFiniteDerivative
from cableflat.model.quadrotor import exp_so3, orthonormalize
from cableflat.model.system import StateDerivative, SystemState

__all__ = ["Dynamics", "Constraint", "rk4_step"]

Dynamics = Callable[[float, SystemState], StateDerivative]
Constraint = Callable[[float, SystemState], SystemState]


def _advance(
    state: SystemState, derivative: StateDerivative, h: float
) -> SystemState:
    rotations = state.rotations
    if rotations.size:
        rotations = rotations @ exp_so3(h * derivative.body_rates)
    return SystemState(
        positions=state.positions + h * derivative.velocities,
        velocities=state.velocities + h * derivative.accelerations,
        rotations=rotations,
        omegas=state.omegas + h * derivative.angular_accelerations,
    )


def _evaluate(dynamics: Dynamics, t: float, state: SystemState) -> StateDerivative:
    derivative = dynamics(t, state)
    if not derivative.is_finite():
        raise NonFiniteDerivative("state derivative is not finite", time=t)
    return derivative


def rk4_step(
    state: SystemState,
    dynamics: Dynamics,
    dt: float,
    t: float = 0.0,
    constraint: Optional[Constraint] = None,
) -> SystemState:
    r"""Advance ``state`` by one RK4 step.

    Args:
        state: State at time ``t``
        dynamics: Returns the state derivative at a given time and state
        dt: Step size in s
        t: Current time
        constraint: Applied to every stage state and to the result, used to
            impose prescribed boundary motion

    Returns:
        State at time ``t + dt``
    """
    if not dt > 0:
        raise InvalidConfig("integration step must be positive, got {}".format(dt))
    half = 0.5 * dt
    if constraint is None:
        constraint = _unconstrained
    k1 = _evaluate(dynamics, t, state)
    k2 = _evaluate(dynamics, t + half, constraint(t + half, _advance(state, k1, half)))
    k3 = _evaluate(dynamics, t + half, constraint(t + half, _advance(state, k2, half)))
    k4 = _evaluate(dynamics, t + dt, constraint(t + dt, _advance(state, k3, dt)))

    def combine(name: str) -> np.ndarray:
        return (
            getattr(k1, name)
            + 2.0 * getattr(k2, name)
            + 2.0 * getattr(k3, name)
            + getattr(k4, name)
        ) / 6.0

    rotations = state.rotations
    if rotations.size:
        rotations = orthonormalize(rotations @ exp_so3(dt * combine("body_rates")))
    result = SystemState(
        positions=state.positions + dt * combine("velocities"),
        velocities=state.velocities + dt * combine("accelerations"),
        rotations=rotations,
        omegas=state.omegas + dt * combine("angular_accelerations"),
    )
    return constraint(t + dt, result)


def _unconstrained(t: float, state: SystemState) -> SystemState:
    return state
