r"""State of the whole cable plus robots system and its coupled dynamics."""
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from cableflat.errors import InvalidConfig
from cableflat.model.cable import E3, free_mass_accelerations, segment_forces
from cableflat.model.params import CableParams, QuadParams
from cableflat.model.quadrotor import QuadState

__all__ = ["SystemState", "StateDerivative", "RobotFleet", "system_dynamics"]


@dataclass(frozen=True)
class SystemState:
    r"""Positions and velocities of all point masses plus the robot attitudes.

    Robot ``j`` shares position and velocity with the cable mass it carries, row
    ``j - 1`` of ``positions``. Attitude arrays are ordered like the robot set.

    Args:
        positions: Shape (n, 3)
        velocities: Shape (n, 3)
        rotations: Shape (n_R, 3, 3), body to world
        omegas: Shape (n_R, 3), body angular velocity
    """

    positions: np.ndarray
    velocities: np.ndarray
    rotations: np.ndarray
    omegas: np.ndarray

    @classmethod
    def at_rest(cls, positions, n_robots: int) -> "SystemState":
        positions = np.asarray(positions, dtype=float)
        return cls(
            positions=positions,
            velocities=np.zeros_like(positions),
            rotations=np.tile(np.eye(3), (n_robots, 1, 1)),
            omegas=np.zeros((n_robots, 3)),
        )

    def is_finite(self) -> bool:
        return all(
            np.all(np.isfinite(a))
            for a in (self.positions, self.velocities, self.rotations, self.omegas)
        )

    def robot(self, slot: int, j: int) -> QuadState:
        return QuadState(
            p=self.positions[j - 1],
            v=self.velocities[j - 1],
            R=self.rotations[slot],
            omega=self.omegas[slot],
        )

    def with_positions(self, positions, velocities=None) -> "SystemState":
        changes = {"positions": np.asarray(positions, dtype=float)}
        if velocities is not None:
            changes["velocities"] = np.asarray(velocities, dtype=float)
        return replace(self, **changes)


@dataclass(frozen=True)
class StateDerivative:
    r"""Time derivative of a :class:`SystemState`.

    ``body_rates`` is the angular velocity that drives the exponential-map
    attitude update, ``dR/dt = R hat(body_rates)``.
    """

    velocities: np.ndarray
    accelerations: np.ndarray
    body_rates: np.ndarray
    angular_accelerations: np.ndarray

    def is_finite(self) -> bool:
        return all(
            np.all(np.isfinite(a))
            for a in (
                self.velocities,
                self.accelerations,
                self.body_rates,
                self.angular_accelerations,
            )
        )


class RobotFleet:
    r"""Per-robot parameters of a topology, with the stacked arrays the dynamics use.

    Args:
        topology: Cable topology
        cable: Cable parameters
        quads: One parameter set per robot, in robot order; a single set is
            shared by every robot
    """

    def __init__(self, topology, cable: CableParams, quads) -> None:
        if isinstance(quads, QuadParams):
            quads = [quads]
        quads = list(quads)
        if len(quads) == 1 and topology.n_robots > 1:
            quads = quads * topology.n_robots
        if len(quads) != topology.n_robots:
            raise InvalidConfig(
                "{} robot parameter sets given for {} robots".format(
                    len(quads), topology.n_robots
                )
            )
        self.topology = topology
        self.cable = cable
        self.quads = [q.attached_to(j) for q, j in zip(quads, topology.robots)]
        self.rows = np.array([j - 1 for j in topology.robots])
        self.total_masses = np.array([q.total_mass(cable) for q in self.quads])
        self.inertia = np.stack([q.J for q in self.quads])
        self.inertia_inv = np.stack([q.J_inv for q in self.quads])
        self.f_max = np.array([q.f_max for q in self.quads])

    def __iter__(self):
        return iter(zip(self.topology.robots, self.quads))

    def __len__(self) -> int:
        return len(self.quads)


def system_dynamics(
    state: SystemState,
    thrusts: Sequence[float],
    torques,
    fleet: RobotFleet,
    forces: Optional[np.ndarray] = None,
) -> StateDerivative:
    r"""Coupled cable and robot dynamics.

    Free masses follow the point-mass law with viscous damping; a robot and the
    cable mass it carries move as one body of mass m-bar under gravity, its
    thrust and the two adjacent segment forces.

    Args:
        state: Current state
        thrusts: Total thrust per robot, shape (n_R,)
        torques: Body torque per robot, shape (n_R, 3)
        fleet: Robot parameters
        forces: Precomputed segment forces, shape (n+1, 3)

    Returns:
        The state derivative
    """
    topology, cable = fleet.topology, fleet.cable
    if forces is None:
        forces = segment_forces(state.positions, topology, cable)
    accelerations = free_mass_accelerations(
        state.positions, state.velocities, topology, cable, forces
    )
    rows = fleet.rows
    thrust_vectors = np.asarray(thrusts, dtype=float)[:, None] * state.rotations[:, :, 2]
    accelerations[rows] = -cable.g * E3 + (
        forces[rows + 1] - forces[rows] + thrust_vectors
    ) / fleet.total_masses[:, None]
    omegas = state.omegas
    J_omega = np.einsum("rij,rj->ri", fleet.inertia, omegas)
    angular = np.einsum(
        "rij,rj->ri",
        fleet.inertia_inv,
        np.asarray(torques, dtype=float) - np.cross(omegas, J_omega),
    )
    return StateDerivative(
        velocities=state.velocities,
        accelerations=accelerations,
        body_rates=omegas,
        angular_accelerations=angular,
    )
