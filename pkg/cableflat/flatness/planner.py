r"""Flatness-based trajectory generation.

Given the flat outputs (selected cable points and the robot yaws) the recursion
walks along the cable. Each free mass is crossed by solving its equation of
motion for the unknown segment force and then inverting the spring law for the
next position; each robot is crossed with the next flat point and the robot
equations. All quantities are jets over the whole time grid.
"""
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from cableflat.errors import (
    CableFlatError,
    FlatOutputMismatch,
    InsufficientDepth,
    InvalidConfig,
    ResidualExceeded,
    SchemaError,
    SeparationTooSmall,
    ZeroForce,
    first_sample,
    locate,
)
from cableflat.flatness.jet import Jet
from cableflat.flatness.primitives import Primitive
from cableflat.model.cable import E3, EPS_SEP, segment_forces
from cableflat.model.params import CableParams
from cableflat.model.quadrotor import TrackingReference, attitude_from_flat
from cableflat.model.system import RobotFleet

__all__ = [
    "EPS_FORCE",
    "EPS_RES",
    "BRANCHES",
    "FlatOutputs",
    "PlannedTrajectory",
    "spring_force_jet",
    "anchor_force_jet",
    "chain_force_jet",
    "previous_force_jet",
    "next_position_jet",
    "previous_position_jet",
    "robot_thrust_jet",
    "robot_next_force_jet",
    "required_depth",
    "default_depth",
    "plan",
    "plan_class_a",
    "plan_class_b",
    "plan_class_c",
]

logger = logging.getLogger(__name__)

EPS_FORCE = 1e-6
EPS_RES = 1e-6
BRANCHES = ("tension", "compression")
AXES = ("x", "y", "z")


def spring_force_jet(p_i: Jet, p_next: Jet, k: float, l0: float) -> Jet:
    delta = p_i - p_next
    close = np.linalg.norm(delta.value, axis=-1) < EPS_SEP
    if np.any(close):
        raise SeparationTooSmall(
            "segment end points closer than {:g} m".format(EPS_SEP),
            sample=first_sample(close),
        )
    return (delta - delta.unit(EPS_SEP) * l0) * (-k)


def anchor_force_jet(p1: Jet, k0: float, l00: float) -> Jet:
    r"""Ground segment force ``k0 (p1 - l00 p1 / ||p1||)`` along the trajectory"""
    return spring_force_jet(p1 * 0.0, p1, k0, l00)


def _motion_terms(i: int, p: Jet, params: CableParams):
    if p.depth < 2:
        raise InsufficientDepth(
            "position jet of depth {} cannot be differentiated twice".format(p.depth),
            index=i,
        )
    m, c = params.point(i)
    acceleration = p.differentiate(2)
    velocity = p.differentiate(1).truncate(acceleration.depth)
    return acceleration * m + velocity * c + m * params.g * E3


def chain_force_jet(i: int, p_i: Jet, f_prev: Jet, params: CableParams) -> Jet:
    r"""Force of segment ``i`` from the motion of free mass ``i``.

    Solves ``m p'' = -m g e3 + f_i - f_{i-1} - c p'`` for ``f_i``; the result is
    two derivative orders shallower than ``p_i``.
    """
    return _motion_terms(i, p_i, params) + f_prev


def previous_force_jet(i: int, p_i: Jet, f_i: Jet, params: CableParams) -> Jet:
    r"""Force of segment ``i - 1`` from the motion of free mass ``i``"""
    return f_i - _motion_terms(i, p_i, params)


def _force_direction(i: int, f: Jet) -> Jet:
    weak = np.linalg.norm(f.value, axis=-1) < EPS_FORCE
    if np.any(weak):
        raise ZeroForce(
            "segment force vanishes, the recursion is undefined",
            index=i,
            sample=first_sample(weak),
        )
    return f.unit(EPS_FORCE)


def _check_branch(branch: str) -> None:
    if branch not in BRANCHES:
        raise InvalidConfig(
            "branch must be one of {}, got '{}'".format(BRANCHES, branch)
        )


def next_position_jet(
    i: int, p_i: Jet, f_i: Jet, params: CableParams, branch: str = "tension"
) -> Jet:
    r"""Invert the spring law of segment ``i`` for ``p_{i+1}``.

    A given force has two pre-images: a stretched segment,
    ``p_{i+1} = p_i + f/k + l0 f/||f||``, and a compressed one,
    ``p_{i+1} = p_i + f/k - l0 f/||f||``.
    """
    _check_branch(branch)
    k, l0 = params.segment(i)
    direction = _force_direction(i, f_i)
    sign = 1.0 if branch == "tension" else -1.0
    return p_i + f_i * (1.0 / k) + direction * (sign * l0)


def previous_position_jet(
    i: int, p_i: Jet, f_prev: Jet, params: CableParams, branch: str = "tension"
) -> Jet:
    r"""Invert the spring law of segment ``i - 1`` for ``p_{i-1}``"""
    _check_branch(branch)
    k, l0 = params.segment(i - 1)
    direction = _force_direction(i - 1, f_prev)
    sign = 1.0 if branch == "tension" else -1.0
    return p_i - f_prev * (1.0 / k) - direction * (sign * l0)


def robot_thrust_jet(
    j: int, p_R: Jet, f_prev: Jet, f_j: Jet, m_bar: float, g: float
) -> Jet:
    r"""Thrust vector ``m (p'' + g e3) - f_j + f_{j-1}`` of robot ``j``"""
    if p_R.depth < 2:
        raise InsufficientDepth(
            "robot position jet of depth {} cannot be differentiated twice".format(
                p_R.depth
            ),
            index=j,
        )
    return (p_R.differentiate(2) + g * E3) * m_bar - f_j + f_prev


def robot_next_force_jet(j: int, p_j: Jet, p_next: Jet, params: CableParams) -> Jet:
    k, l0 = params.segment(j)
    return spring_force_jet(p_j, p_next, k, l0)


def required_depth(topology, pair: Optional[Tuple[int, int]] = None) -> int:
    r"""Smallest jet depth for which the recursion delivers angular accelerations.

    Every free mass crossed costs two derivative orders, the thrust needs two
    more and the attitude reconstruction another two.
    """
    n = topology.n
    worst = 0

    def up(m: int, loss_p: int, loss_f_prev: int) -> int:
        worst_up = 0
        while m <= n:
            if topology.is_robot(m):
                loss_f = loss_p if m < n else 0
                worst_up = max(worst_up, loss_p + 2, loss_f, loss_f_prev)
                loss_p, loss_f_prev = 0, loss_f
            else:
                loss_f = max(loss_p + 2, loss_f_prev)
                loss_p, loss_f_prev = loss_f, loss_f
            m += 1
        return worst_up

    def down(m: int, loss_p: int, loss_f: int) -> int:
        worst_down = 0
        while m >= 1:
            if topology.is_robot(m):
                loss_f_prev = loss_p if m > 1 else 0
                worst_down = max(worst_down, loss_p + 2, loss_f, loss_f_prev)
                loss_p, loss_f = 0, loss_f_prev
            else:
                loss_f_prev = max(loss_p + 2, loss_f)
                loss_p, loss_f = loss_f_prev, loss_f_prev
            m -= 1
        return worst_down

    if topology.system_class in ("A", "B"):
        worst = up(1, 0, 0)
    else:
        if pair is None:
            raise InvalidConfig("class C needs the output pair")
        worst = max(up(pair[1], 0, 0), down(pair[0], 0, 0))
    return worst + 2


def default_depth(topology, pair: Optional[Tuple[int, int]] = None) -> int:
    return max(2 * topology.n + 6, required_depth(topology, pair))


@dataclass(frozen=True)
class FlatOutputs:
    r"""Flat-output trajectories by channel name.

    Position channels are named ``p<i>`` and are 3-dimensional, yaw channels
    ``yaw<j>`` are scalar. Class C systems also name the consecutive output pair.
    """

    channels: Dict[str, Primitive]
    pair: Optional[Tuple[int, int]] = None

    def validate(self, topology) -> None:
        pair = tuple(self.pair) if self.pair is not None else None
        if topology.system_class != "C" and pair is not None:
            raise FlatOutputMismatch("only class C flat outputs take an output pair")
        expected = topology.flat_targets(pair)
        missing = sorted(set(expected) - set(self.channels))
        extra = sorted(set(self.channels) - set(expected))
        if missing or extra:
            raise FlatOutputMismatch(
                "flat outputs for {} must be exactly {}; missing {}, unexpected {}".format(
                    topology, expected, missing or "none", extra or "none"
                )
            )
        for name, primitive in self.channels.items():
            size = 1 if name.startswith("yaw") else 3
            if primitive.dim != size:
                raise FlatOutputMismatch(
                    "channel '{}' must have {} component(s), got {}".format(
                        name, size, primitive.dim
                    )
                )
        scalars = sum(p.dim for p in self.channels.values())
        if scalars != 4 * topology.n_robots:
            raise FlatOutputMismatch(
                "{} scalar flat outputs given, {} expected".format(
                    scalars, 4 * topology.n_robots
                )
            )

    def jets(self, times, depth: int) -> Dict[str, Jet]:
        return {name: p.jet(times, depth) for name, p in self.channels.items()}

    def positions(self, index: int, times) -> np.ndarray:
        return self.channels["p{}".format(index)](times)


def _columns(prefix: str, index, suffixes=AXES) -> List[str]:
    return ["{}{}_{}".format(prefix, index, s) for s in suffixes]


@dataclass(frozen=True)
class PlannedTrajectory:
    r"""Full state and input trajectory produced by the planner.

    Per-mass arrays have shape (T, n, 3), segment forces (T, n+1, 3) with entry
    ``i`` the force of segment ``i`` on mass ``i``, and per-robot arrays have the
    robot slot on axis 1.
    """

    times: np.ndarray
    topology: object
    positions: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    forces: np.ndarray
    thrust_vectors: np.ndarray
    thrusts: np.ndarray
    torques: np.ndarray
    rotations: np.ndarray
    omegas: np.ndarray
    omega_dots: np.ndarray
    yaws: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def robot_positions(self) -> np.ndarray:
        return self.positions[:, [j - 1 for j in self.topology.robots]]

    def robot_reference(self, slot: int, sample: int) -> TrackingReference:
        row = self.topology.robots[slot] - 1
        return TrackingReference(
            p=self.positions[sample, row],
            v=self.velocities[sample, row],
            a=self.accelerations[sample, row],
            jerk=np.zeros(3),
            yaw=float(self.yaws[sample, slot]),
            thrust_vector=self.thrust_vectors[sample, slot],
            omega=self.omegas[sample, slot],
            omega_dot=self.omega_dots[sample, slot],
        )

    def residuals(self, cable: CableParams, fleet: RobotFleet) -> Dict[str, np.ndarray]:
        r"""Per-sample violation of the equations of motion.

        Segment forces are recomputed from the planned positions, independently
        of the recursion.

        Returns:
            ``"mass"``: shape (T, n_free) norms of the free-mass equation residual,
            ``"robot"``: shape (T, n_R) norms of the robot translational residual
        """
        topology = self.topology
        forces = segment_forces(self.positions, topology, cable)
        free = [i - 1 for i in topology.free_masses]
        mass = cable.mass[free, None]
        c = cable.c[free, None]
        lhs = mass * (self.accelerations[:, free] + cable.g * E3)
        mass_residual = (
            lhs
            - forces[:, [i + 1 for i in free]]
            + forces[:, free]
            + c * self.velocities[:, free]
        )
        rows = fleet.rows
        m_bar = fleet.total_masses[:, None]
        thrust = self.thrusts[:, :, None] * self.rotations[:, :, :, 2]
        robot_residual = (
            m_bar * (self.accelerations[:, rows] + cable.g * E3)
            - forces[:, rows + 1]
            + forces[:, rows]
            - thrust
        )
        return {
            "mass": np.linalg.norm(mass_residual, axis=-1),
            "robot": np.linalg.norm(robot_residual, axis=-1),
        }

    def max_residual(self, cable: CableParams, fleet: RobotFleet) -> float:
        residuals = self.residuals(cable, fleet)
        return float(max(np.max(r, initial=0.0) for r in residuals.values()))

    def to_frame(self) -> pd.DataFrame:
        topology = self.topology
        data = {"t": self.times}
        for name, array in (
            ("p", self.positions),
            ("v", self.velocities),
            ("a", self.accelerations),
        ):
            for i in range(1, topology.n + 1):
                for a, column in enumerate(_columns(name, i)):
                    data[column] = array[:, i - 1, a]
        for i in range(topology.n + 1):
            for a, column in enumerate(_columns("f", i)):
                data[column] = self.forces[:, i, a]
        for slot, j in enumerate(topology.robots):
            data["thrust{}".format(j)] = self.thrusts[:, slot]
            data["yaw{}".format(j)] = self.yaws[:, slot]
            for name, array in (
                ("u", self.thrust_vectors),
                ("tau", self.torques),
                ("omega", self.omegas),
                ("omegadot", self.omega_dots),
            ):
                for a, column in enumerate(_columns(name, j)):
                    data[column] = array[:, slot, a]
            for r in range(3):
                for c in range(3):
                    data["R{}_{}{}".format(j, r, c)] = self.rotations[:, slot, r, c]
        return pd.DataFrame(data)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, topology) -> "PlannedTrajectory":
        try:
            n = topology.n
            per_mass = {
                name: np.stack(
                    [frame[_columns(name, i)].to_numpy() for i in range(1, n + 1)],
                    axis=1,
                )
                for name in ("p", "v", "a")
            }
            forces = np.stack(
                [frame[_columns("f", i)].to_numpy() for i in range(n + 1)], axis=1
            )
            robots = topology.robots
            per_robot = {
                name: np.stack([frame[_columns(name, j)].to_numpy() for j in robots], axis=1)
                for name in ("u", "tau", "omega", "omegadot")
            }
            rotations = np.stack(
                [
                    frame[
                        ["R{}_{}{}".format(j, r, c) for r in range(3) for c in range(3)]
                    ]
                    .to_numpy()
                    .reshape(-1, 3, 3)
                    for j in robots
                ],
                axis=1,
            )
            thrusts = frame[["thrust{}".format(j) for j in robots]].to_numpy()
            yaws = frame[["yaw{}".format(j) for j in robots]].to_numpy()
            times = frame["t"].to_numpy()
        except KeyError as error:
            raise SchemaError("planned trajectory is missing column {}".format(error))
        return cls(
            times=times,
            topology=topology,
            positions=per_mass["p"],
            velocities=per_mass["v"],
            accelerations=per_mass["a"],
            forces=forces,
            thrust_vectors=per_robot["u"],
            thrusts=thrusts,
            torques=per_robot["tau"],
            rotations=rotations,
            omegas=per_robot["omega"],
            omega_dots=per_robot["omegadot"],
            yaws=yaws,
        )

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.12g")

    @classmethod
    def read_csv(cls, path: Union[str, Path], topology) -> "PlannedTrajectory":
        return cls.from_frame(pd.read_csv(path), topology)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlannedTrajectory):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self)
            if f.name != "topology"
        )


class _ChainRecursion:
    r"""State of one run of the recursion: every jet found so far, by index"""

    def __init__(
        self,
        topology,
        cable: CableParams,
        fleet: RobotFleet,
        flat,
        times,
        branch,
        corrections=None,
    ):
        self.topology = topology
        self.cable = cable
        self.fleet = fleet
        self.flat = flat
        self.times = times
        self.branch = branch
        self.corrections: Dict[int, np.ndarray] = dict(corrections or {})
        self.p: Dict[int, Jet] = {}
        self.f: Dict[int, Jet] = {}
        self.u: Dict[int, Jet] = {}
        self.m_bar = dict(zip(topology.robots, fleet.total_masses))

    def _zero(self) -> Jet:
        depth = max(jet.depth for jet in self.flat.values())
        return Jet.constant(np.zeros(3), depth, samples=len(self.times))

    def _flat_point(self, i: int) -> Jet:
        return self.flat["p{}".format(i)]

    def _corrected(self, i: int, p: Jet) -> Jet:
        offset = self.corrections.get(i)
        return p if offset is None else p + np.asarray(offset, dtype=float)

    def _thrust(self, j: int) -> None:
        self.u[j] = robot_thrust_jet(
            j, self.p[j], self.f[j - 1], self.f[j], self.m_bar[j], self.cable.g
        )

    def step(self, index: int, operation, *args):
        try:
            return operation(*args)
        except CableFlatError as error:
            raise locate(error, self.times, index=index) from error

    def up(self, m: int) -> None:
        r"""Walk towards increasing indexes; needs ``p[m]`` and ``f[m-1]``"""
        n = self.topology.n
        while m <= n:
            if self.topology.is_robot(m):
                if m == n:
                    self.f[m] = self._zero()
                else:
                    self.p[m + 1] = self._flat_point(m + 1)
                    self.f[m] = self.step(
                        m, robot_next_force_jet, m, self.p[m], self.p[m + 1], self.cable
                    )
                self.step(m, self._thrust, m)
            else:
                self.f[m] = self.step(
                    m, chain_force_jet, m, self.p[m], self.f[m - 1], self.cable
                )
                self.p[m + 1] = self._corrected(
                    m + 1,
                    self.step(
                        m, next_position_jet, m, self.p[m], self.f[m], self.cable, self.branch
                    ),
                )
            m += 1

    def down(self, m: int) -> None:
        r"""Walk towards decreasing indexes; needs ``p[m]`` and ``f[m]``"""
        while m >= 1:
            if self.topology.is_robot(m):
                if m == 1:
                    self.f[0] = self._zero()
                else:
                    self.p[m - 1] = self._flat_point(m - 1)
                    self.f[m - 1] = self.step(
                        m,
                        robot_next_force_jet,
                        m - 1,
                        self.p[m - 1],
                        self.p[m],
                        self.cable,
                    )
                self.step(m, self._thrust, m)
            else:
                self.f[m - 1] = self.step(
                    m, previous_force_jet, m, self.p[m], self.f[m], self.cable
                )
                self.p[m - 1] = self._corrected(
                    m - 1,
                    self.step(
                        m,
                        previous_position_jet,
                        m,
                        self.p[m],
                        self.f[m - 1],
                        self.cable,
                        self.branch,
                    ),
                )
            m -= 1

    def trajectory(self) -> PlannedTrajectory:
        topology = self.topology
        n = topology.n
        positions = np.stack([self.p[i].value for i in range(1, n + 1)], axis=1)
        velocities = np.stack([self.p[i].derivative(1) for i in range(1, n + 1)], axis=1)
        accelerations = np.stack(
            [self.p[i].derivative(2) for i in range(1, n + 1)], axis=1
        )
        forces = np.stack([self.f[i].value for i in range(n + 1)], axis=1)
        attitudes = []
        for j, quad in self.fleet:
            yaw = self.flat["yaw{}".format(j)]
            attitudes.append(
                self.step(j, attitude_from_flat, self.u[j], yaw, quad.J)
            )
        return PlannedTrajectory(
            times=np.asarray(self.times, dtype=float),
            topology=topology,
            positions=positions,
            velocities=velocities,
            accelerations=accelerations,
            forces=forces,
            thrust_vectors=np.stack([self.u[j].value for j in topology.robots], axis=1),
            thrusts=np.stack([a.thrust for a in attitudes], axis=1),
            torques=np.stack([a.torque for a in attitudes], axis=1),
            rotations=np.stack([a.R for a in attitudes], axis=1),
            omegas=np.stack([a.omega for a in attitudes], axis=1),
            omega_dots=np.stack([a.omega_dot for a in attitudes], axis=1),
            yaws=np.stack(
                [self.flat["yaw{}".format(j)].value[:, 0] for j in topology.robots],
                axis=1,
            ),
        )


def _prepare(flat: FlatOutputs, topology, cable, quads, times, depth, expected_class):
    if topology.system_class != expected_class:
        raise InvalidConfig(
            "expected a class {} topology, got class {}".format(
                expected_class, topology.system_class
            )
        )
    cable.check(topology)
    fleet = quads if isinstance(quads, RobotFleet) else RobotFleet(topology, cable, quads)
    flat.validate(topology)
    pair = tuple(flat.pair) if flat.pair is not None else None
    minimum = required_depth(topology, pair)
    if depth is None:
        depth = default_depth(topology, pair)
    if depth < minimum:
        raise InsufficientDepth(
            "jet depth {} is too small for {}, at least {} is required".format(
                depth, topology, minimum
            )
        )
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.shape[0] == 0:
        raise InvalidConfig("the time grid must be a non-empty 1-D array")
    return fleet, flat.jets(times, depth), times


def _finish(recursion: _ChainRecursion) -> PlannedTrajectory:
    trajectory = recursion.trajectory()
    worst = trajectory.max_residual(recursion.cable, recursion.fleet)
    if worst > EPS_RES:
        residuals = trajectory.residuals(recursion.cable, recursion.fleet)
        per_sample = np.max(np.concatenate(list(residuals.values()), axis=1), axis=1)
        sample = int(np.argmax(per_sample))
        raise ResidualExceeded(
            "planned trajectory violates the dynamics by {:.3g}, tolerance {:.0e}".format(
                worst, EPS_RES
            ),
            time=float(recursion.times[sample]),
            sample=sample,
        )
    logger.debug("planned trajectory residual %.3g", worst)
    return trajectory


def plan_class_a(
    flat: FlatOutputs,
    topology,
    cable: CableParams,
    quads,
    times,
    depth: Optional[int] = None,
    branch: str = "tension",
) -> PlannedTrajectory:
    r"""Plan a ground-anchored cable.

    The recursion starts from the anchor force of the hanging first mass and
    walks up the cable until the last robot.

    Args:
        flat: Flat outputs ``p1``, ``p<j+1>`` for every robot ``j < n`` and the yaws
        topology: Class A topology
        cable: Cable parameters including the ground segment
        quads: Robot parameters, one per robot or shared
        times: Uniform time grid
        depth: Jet depth, :func:`default_depth` when omitted
        branch: Spring inversion branch, ``"tension"`` or ``"compression"``

    Returns:
        The planned trajectory
    """
    fleet, jets, times = _prepare(flat, topology, cable, quads, times, depth, "A")
    recursion = _ChainRecursion(topology, cable, fleet, jets, times, branch)
    recursion.p[1] = jets["p1"]
    k0, l00 = cable.segment(0)
    recursion.f[0] = recursion.step(0, anchor_force_jet, jets["p1"], k0, l00)
    recursion.up(1)
    return _finish(recursion)


def plan_class_b(
    flat: FlatOutputs,
    topology,
    cable: CableParams,
    quads,
    times,
    depth: Optional[int] = None,
    branch: str = "tension",
) -> PlannedTrajectory:
    r"""Plan a cable with a free hanging end, seeded with a zero force on mass 1"""
    fleet, jets, times = _prepare(flat, topology, cable, quads, times, depth, "B")
    recursion = _ChainRecursion(topology, cable, fleet, jets, times, branch)
    recursion.p[1] = jets["p1"]
    recursion.f[0] = recursion._zero()
    recursion.up(1)
    return _finish(recursion)


def plan_class_c(
    flat: FlatOutputs,
    topology,
    cable: CableParams,
    quads,
    times,
    depth: Optional[int] = None,
    branch: str = "tension",
    corrections: Optional[Dict[int, np.ndarray]] = None,
) -> PlannedTrajectory:
    r"""Plan a cable held at both ends from two consecutive interior points.

    The force of the segment joining the output pair follows from the spring
    law; the recursion then runs outwards in both directions.

    ``corrections`` maps a point index to an offset added to its position right
    after the spring inversion that produces it; the offset is carried by every
    point computed after it. A corrected plan is not checked against the model.
    """
    if flat.pair is None:
        raise FlatOutputMismatch("class C flat outputs need the output pair")
    fleet, jets, times = _prepare(flat, topology, cable, quads, times, depth, "C")
    i, i_next = flat.pair
    recursion = _ChainRecursion(topology, cable, fleet, jets, times, branch, corrections)
    recursion.p[i] = jets["p{}".format(i)]
    recursion.p[i_next] = jets["p{}".format(i_next)]
    recursion.f[i] = recursion.step(
        i, robot_next_force_jet, i, recursion.p[i], recursion.p[i_next], cable
    )
    recursion.up(i_next)
    recursion.down(i)
    if corrections:
        return recursion.trajectory()
    return _finish(recursion)


def plan(
    flat: FlatOutputs,
    topology,
    cable: CableParams,
    quads,
    times,
    depth: Optional[int] = None,
    branch: str = "tension",
) -> PlannedTrajectory:
    planner = {"A": plan_class_a, "B": plan_class_b, "C": plan_class_c}[
        topology.system_class
    ]
    return planner(flat, topology, cable, quads, times, depth=depth, branch=branch)
