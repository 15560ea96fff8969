r"""Lumped-mass cable force laws, point-mass dynamics and statics.

Every function here is pure and accepts positions with arbitrary leading batch
axes, the last axis holding the three Cartesian components.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from cableflat.errors import NoConvergence, SeparationTooSmall, first_sample
from cableflat.model.params import CableParams

__all__ = [
    "EPS_SEP",
    "EPS_EQ",
    "E3",
    "MassState",
    "spring_force",
    "ground_anchor_force",
    "mass_acceleration",
    "segment_forces",
    "free_mass_accelerations",
    "mechanical_energy",
    "static_equilibrium",
]

logger = logging.getLogger(__name__)

EPS_SEP = 1e-6
EPS_EQ = 1e-9
E3 = np.array([0.0, 0.0, 1.0])
E3.flags.writeable = False


@dataclass(frozen=True)
class MassState:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        for name in ("p", "v"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (3,) or not np.all(np.isfinite(value)):
                raise ValueError("'{}' must be a finite 3-vector".format(name))
            value.flags.writeable = False
            object.__setattr__(self, name, value)


def _separation(p_i: np.ndarray, p_next: np.ndarray):
    delta = np.asarray(p_i, dtype=float) - np.asarray(p_next, dtype=float)
    distance = np.linalg.norm(delta, axis=-1, keepdims=True)
    close = distance[..., 0] < EPS_SEP
    if np.any(close):
        raise SeparationTooSmall(
            "segment end points closer than {:g} m".format(EPS_SEP),
            sample=first_sample(close),
        )
    return delta, distance


def spring_force(p_i, p_next, k, l0) -> np.ndarray:
    r"""Force exerted by a segment on its lower-index end point.

    ``f = -k [(p_i - p_next) - l0 (p_i - p_next) / ||p_i - p_next||]``; the opposite
    force acts on ``p_next``. The law is bilateral, compressed segments push.

    Args:
        p_i: Position of the lower-index end, shape (..., 3)
        p_next: Position of the higher-index end, shape (..., 3)
        k: Stiffness in N/m, scalar or broadcastable to (..., 1)
        l0: Rest length in m, scalar or broadcastable to (..., 1)

    Returns:
        The force acting on ``p_i``, shape (..., 3)
    """
    delta, distance = _separation(p_i, p_next)
    return -k * (delta - l0 * delta / distance)


def ground_anchor_force(p_1, k0, l00) -> np.ndarray:
    r"""Force of the ground segment of class A systems, anchored at the origin.

    Uses ``f_0 = k0 (p_1 - l00 p_1 / ||p_1||)``; ``-f_0`` acts on mass 1.
    The inline model description writes ``+ l00 p_1 / ||p_1||``, which is not a
    spring law; the form consumed by the flatness recursion is used everywhere.
    This equals ``spring_force(0, p_1, k0, l00)``.
    """
    p_1 = np.asarray(p_1, dtype=float)
    return spring_force(np.zeros_like(p_1), p_1, k0, l00)


def mass_acceleration(
    i: int, state: MassState, f_i, f_prev, params: CableParams
) -> np.ndarray:
    r"""Acceleration of free mass ``i`` from its two adjacent segment forces"""
    if i < 1 or i > params.n:
        raise IndexError("mass index {} outside 1..{}".format(i, params.n))
    m, c = params.point(i)
    force = -m * params.g * E3 + np.asarray(f_i) - np.asarray(f_prev) - c * state.v
    return force / m


def segment_forces(positions, topology, params: CableParams) -> np.ndarray:
    r"""All internal forces ``f_0..f_n`` of a configuration.

    Args:
        positions: Mass positions, shape (..., n, 3)

    Returns:
        Array of shape (..., n+1, 3) where entry ``i`` is the force of segment ``i``
        on mass ``i``. Entries that have no segment (``f_0`` for classes B and C,
        ``f_n`` always) are zero.
    """
    positions = np.asarray(positions, dtype=float)
    n = params.n
    forces = np.zeros(positions.shape[:-2] + (n + 1, 3))
    if n > 1:
        k = params.stiffness[1:, None]
        l0 = params.rest_lengths[1:, None]
        forces[..., 1:n, :] = spring_force(
            positions[..., :-1, :], positions[..., 1:, :], k, l0
        )
    if topology.has_anchor:
        k0, l00 = params.segment(0)
        forces[..., 0, :] = ground_anchor_force(positions[..., 0, :], k0, l00)
    return forces


def free_mass_accelerations(
    positions, velocities, topology, params: CableParams, forces=None
) -> np.ndarray:
    r"""Accelerations of every mass treated as a free point mass.

    Entries belonging to robots are meaningless here and are overwritten by
    the robot equations.
    """
    if forces is None:
        forces = segment_forces(positions, topology, params)
    mass = params.mass[:, None]
    c = params.c[:, None]
    net = (
        -mass * params.g * E3
        + forces[..., 1:, :]
        - forces[..., :-1, :]
        - c * np.asarray(velocities, dtype=float)
    )
    return net / mass


def mechanical_energy(positions, velocities, topology, params: CableParams) -> np.ndarray:
    r"""Kinetic plus elastic plus gravitational energy of the cable masses"""
    positions = np.asarray(positions, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    kinetic = 0.5 * np.sum(params.mass * np.sum(velocities ** 2, axis=-1), axis=-1)
    gravity = np.sum(params.mass * params.g * positions[..., 2], axis=-1)
    elastic = np.zeros(positions.shape[:-2])
    if params.n > 1:
        stretch = np.linalg.norm(positions[..., :-1, :] - positions[..., 1:, :], axis=-1)
        elastic = elastic + 0.5 * np.sum(
            params.stiffness[1:] * (stretch - params.rest_lengths[1:]) ** 2, axis=-1
        )
    if topology.has_anchor:
        k0, l00 = params.segment(0)
        stretch = np.linalg.norm(positions[..., 0, :], axis=-1)
        elastic = elastic + 0.5 * k0 * (stretch - l00) ** 2
    return kinetic + gravity + elastic


def _initial_guess(topology, params: CableParams, fixed: Dict[int, np.ndarray]):
    n = topology.n
    positions = np.zeros((n + 1, 3))
    anchors = sorted(fixed)
    for i in anchors:
        positions[i] = fixed[i]
    rest = params.rest_lengths
    for i in range(1, n + 1):
        if i in fixed:
            continue
        lower = max((a for a in anchors if a < i), default=None)
        upper = min((a for a in anchors if a > i), default=None)
        if lower is not None and upper is not None:
            s = (i - lower) / (upper - lower)
            positions[i] = (1 - s) * fixed[lower] + s * fixed[upper]
        elif upper is not None:
            # free hanging end below the first fixed point
            drop = np.sum(rest[i:upper])
            positions[i] = fixed[upper] - drop * E3
        else:
            drop = np.sum(rest[lower:i])
            positions[i] = fixed[lower] - drop * E3
    return positions[1:]


def _segment_stiffness(delta: np.ndarray, k: float, l0: float) -> np.ndarray:
    r = np.linalg.norm(delta)
    u = delta / r
    return k * ((1.0 - l0 / r) * np.eye(3) + (l0 / r) * np.outer(u, u))


def static_equilibrium(
    topology,
    params: CableParams,
    boundary: Dict[int, np.ndarray],
    tol: float = EPS_EQ,
    max_iter: int = 500,
    guess: Optional[np.ndarray] = None,
) -> np.ndarray:
    r"""Rest configuration of the free masses for fixed robot positions.

    Damped Newton iteration on the stacked net-force residual, carried out as a
    Levenberg-Marquardt minimisation of the potential energy so that the
    iteration settles in a stable (hanging) configuration.

    Args:
        topology: Cable topology
        params: Cable parameters
        boundary: Fixed positions by mass index, one entry per robot
        tol: Residual bound on the net force of every free mass, in N
        max_iter: Iteration cap
        guess: Optional initial positions of all masses, shape (n, 3); the
            default is the straight line between the fixed points

    Returns:
        Positions of all masses, shape (n, 3), with the boundary entries copied
    """
    params.check(topology)
    fixed = {int(i): np.asarray(p, dtype=float) for i, p in boundary.items()}
    missing = [j for j in topology.robots if j not in fixed]
    if missing:
        raise ValueError("no boundary position for robot(s) {}".format(missing))
    if topology.has_anchor:
        fixed[0] = np.zeros(3)
    free = list(topology.free_masses)
    positions = _initial_guess(topology, params, fixed) if guess is None else (
        np.array(guess, dtype=float)
    )
    for i, p in fixed.items():
        if i > 0:
            positions[i - 1] = p
    if not free:
        return positions

    slot = {i: s for s, i in enumerate(free)}
    size = 3 * len(free)

    def net_force(x):
        forces = segment_forces(x, topology, params)
        acc = free_mass_accelerations(x, np.zeros_like(x), topology, params, forces)
        return (params.mass[:, None] * acc)[[i - 1 for i in free]].ravel()

    def energy(x):
        return float(mechanical_energy(x, np.zeros_like(x), topology, params))

    def hessian(x):
        H = np.zeros((size, size))
        padded = np.vstack([np.zeros((1, 3)), x])
        for s in topology.segments:
            k, l0 = params.segment(s)
            K = _segment_stiffness(padded[s] - padded[s + 1], k, l0)
            a, b = slot.get(s), slot.get(s + 1)
            if a is not None:
                H[3 * a:3 * a + 3, 3 * a:3 * a + 3] += K
            if b is not None:
                H[3 * b:3 * b + 3, 3 * b:3 * b + 3] += K
            if a is not None and b is not None:
                H[3 * a:3 * a + 3, 3 * b:3 * b + 3] -= K
                H[3 * b:3 * b + 3, 3 * a:3 * a + 3] -= K
        return H

    rows = [i - 1 for i in free]
    residual = net_force(positions)
    damping = 1e-3 * float(np.max(params.k))
    for iteration in range(max_iter):
        if np.max(np.abs(residual)) < tol:
            logger.debug("static equilibrium reached after %d iterations", iteration)
            return positions
        H = hessian(positions)
        current = energy(positions)
        while True:
            step = np.linalg.solve(H + damping * np.eye(size), residual)
            trial = positions.copy()
            trial[rows] += step.reshape(-1, 3)
            try:
                trial_residual = net_force(trial)
                accepted = energy(trial) <= current + 1e-14 * abs(current) or (
                    np.linalg.norm(trial_residual) < np.linalg.norm(residual)
                )
            except SeparationTooSmall:
                accepted = False
            if accepted:
                positions, residual = trial, trial_residual
                damping = max(damping / 3.0, 1e-12)
                break
            damping *= 4.0
            if damping > 1e12:
                raise NoConvergence("static equilibrium line search stalled")
    raise NoConvergence(
        "static equilibrium residual {:.3g} N after {} iterations".format(
            np.max(np.abs(residual)), max_iter
        )
    )
