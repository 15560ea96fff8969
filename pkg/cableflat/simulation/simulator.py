r"""Simulation of the coupled cable and robot system.

Three modes are supported:

* ``tracked``: every robot runs the geometric controller on the planned
  trajectory, with the planned thrust vector and body rates as feed-forward;
* ``boundary_driven``: robot (or anchor) positions are prescribed signals and
  only the free masses are integrated, the setting of cable identification;
* ``closed_loop``: as ``tracked``, with robot references shifted online by an
  output-feedback controller.
"""
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from cableflat.errors import InstabilityDetected, InvalidConfig, SchemaError
from cableflat.model.cable import (
    free_mass_accelerations,
    segment_forces,
    static_equilibrium,
)
from cableflat.model.params import CableParams
from cableflat.model.quadrotor import (
    ControllerGains,
    TrackingReference,
    geometric_tracking_control,
)
from cableflat.model.system import RobotFleet, StateDerivative, SystemState, system_dynamics
from cableflat.parse.utilities import check_keys, document_hash
from cableflat.simulation.integrator import rk4_step

__all__ = [
    "MODES",
    "INITIAL_STATES",
    "SimConfig",
    "SimLog",
    "BoundarySignals",
    "rollout_batch",
    "simulate",
    "output_error_metrics",
    "default_outputs",
]

logger = logging.getLogger(__name__)

MODES = ("tracked", "boundary_driven", "closed_loop")
INITIAL_STATES = ("planned", "equilibrium", "explicit")
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class SimConfig:
    r"""Simulation settings.

    Args:
        dt: Integration step in s
        duration: Simulated time in s
        mode: One of ``tracked``, ``boundary_driven``, ``closed_loop``
        initial: Initial state source, ``planned`` (first planned or measured
            sample), ``equilibrium`` (static rest shape for the initial robot
            positions) or ``explicit`` (``initial_positions``)
        initial_positions: Positions of all masses for ``explicit``
        at_rest: Start with zero velocities whatever the initial source
        disturbance: Initial position offsets by point name, e.g. ``{"p5": [0, 0.05, 0]}``
        v_max: Speed above which the run is declared unstable, m/s
        log_rate: Logging rate of the tracked modes in Hz
        outputs: Mass indices whose tracking error is reported
        gains: Geometric controller gains
        noise_std: Standard deviation of output measurement noise, closed loop only
        seed: Seed of the measurement noise
    """

    dt: float = 1e-3
    duration: float = 10.0
    mode: str = "tracked"
    initial: str = "planned"
    initial_positions: Optional[Tuple[Tuple[float, float, float], ...]] = None
    at_rest: bool = False
    disturbance: Dict[str, Tuple[float, float, float]] = field(default_factory=dict)
    v_max: float = 50.0
    log_rate: float = 100.0
    outputs: Optional[Tuple[int, ...]] = None
    gains: ControllerGains = field(default_factory=ControllerGains)
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise InvalidConfig("'dt' must be positive")
        if self.duration < self.dt:
            raise InvalidConfig("'duration' must be at least one step")
        if self.mode not in MODES:
            raise InvalidConfig("'mode' must be one of {}".format(MODES))
        if self.initial not in INITIAL_STATES:
            raise InvalidConfig("'initial' must be one of {}".format(INITIAL_STATES))
        if self.initial == "explicit" and self.initial_positions is None:
            raise InvalidConfig("an explicit initial state needs 'initial_positions'")
        if self.v_max <= 0 or self.log_rate <= 0 or self.noise_std < 0:
            raise InvalidConfig("'v_max' and 'log_rate' must be positive")
        for name in self.disturbance:
            if not name.startswith("p") or not name[1:].isdigit():
                raise InvalidConfig("disturbance keys are point names like 'p5'")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def check_step(self, cable: CableParams) -> None:
        r"""Warn when the step exceeds the explicit stability estimate ``2 / omega_max``"""
        omega_max = float(np.sqrt(np.max(cable.k) / np.min(cable.mass)))
        if self.dt >= 2.0 / omega_max:
            logger.warning(
                "step %.3g s exceeds the stability estimate %.3g s of the stiffest segment",
                self.dt,
                2.0 / omega_max,
            )

    def replace(self, **changes) -> "SimConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update({k: v for k, v in changes.items() if v is not None})
        return SimConfig(**data)

    @classmethod
    def from_dict(cls, data: Dict) -> "SimConfig":
        names = [f.name for f in fields(cls)]
        check_keys(data, (), names, "simulation")
        data = dict(data)
        if "gains" in data:
            check_keys(data["gains"], (), ("kp", "kv", "kR", "komega"), "gains")
            data["gains"] = ControllerGains(**data["gains"])
        if data.get("initial_positions") is not None:
            data["initial_positions"] = tuple(map(tuple, data["initial_positions"]))
        if data.get("outputs") is not None:
            data["outputs"] = tuple(int(i) for i in data["outputs"])
        if "disturbance" in data:
            data["disturbance"] = {k: tuple(v) for k, v in data["disturbance"].items()}
        return cls(**data)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["disturbance"] = {k: list(v) for k, v in self.disturbance.items()}
        return data


def default_outputs(topology, pair: Optional[Tuple[int, int]] = None) -> Tuple[int, ...]:
    r"""Free masses among the flat position targets, or all free masses"""
    try:
        targets = topology.flat_targets(pair)
    except InvalidConfig:
        return topology.free_masses
    indices = [int(name[1:]) for name in targets if name.startswith("p")]
    outputs = tuple(i for i in indices if not topology.is_robot(i))
    return outputs or topology.free_masses


@dataclass(frozen=True)
class BoundarySignals:
    r"""Sampled positions of the prescribed points.

    Args:
        times: Uniform sample times, shape (T,)
        indices: Prescribed mass indices
        positions: Positions of all masses, shape (T, n, 3); rows of the
            prescribed masses drive the cable, the others (NaN when unknown)
            are the reference of the error metrics
    """

    times: np.ndarray
    indices: Tuple[int, ...]
    positions: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        if times.ndim != 1 or times.shape[0] < 2:
            raise InvalidConfig("boundary signals need at least two samples")
        if np.any(np.diff(times) <= 0):
            raise InvalidConfig("boundary sample times must increase")
        if positions.ndim != 3 or positions.shape[0] != times.shape[0] or positions.shape[2] != 3:
            raise InvalidConfig(
                "boundary positions must have shape ({}, n, 3), got {}".format(
                    times.shape[0], positions.shape
                )
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def rows(self) -> List[int]:
        return [i - 1 for i in self.indices]

    def velocities(self) -> np.ndarray:
        return np.gradient(self.positions, self.times, axis=0)

    @classmethod
    def from_plan(cls, plan) -> "BoundarySignals":
        return cls(
            times=plan.times,
            indices=tuple(plan.topology.robots),
            positions=plan.positions,
        )


def rollout_batch(
    positions,
    velocities,
    boundary,
    step: float,
    topology,
    cable: CableParams,
    boundary_rows: Sequence[int],
    substeps: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    r"""Integrate batches of cables whose boundary points follow sampled signals.

    Between two samples the boundary moves linearly with the finite-difference
    velocity. Each sample interval is covered by ``substeps`` RK4 steps.

    Args:
        positions: Initial positions, shape (B, n, 3)
        velocities: Initial velocities, shape (B, n, 3)
        boundary: Boundary positions, shape (B, S+1, n_b, 3)
        step: Sample spacing in s
        topology: Cable topology
        cable: Cable parameters
        boundary_rows: Row of each boundary point in the position arrays
        substeps: Integration steps per sample interval

    Returns:
        Positions and velocities at every sample, shape (B, S+1, n, 3) each
    """
    boundary = np.asarray(boundary, dtype=float)
    rows = list(boundary_rows)
    batch, samples = boundary.shape[0], boundary.shape[1]
    dt = step / substeps
    empty_rotations = np.zeros((batch, 0, 3, 3))
    empty_omegas = np.zeros((batch, 0, 3))
    state = SystemState(
        positions=np.array(positions, dtype=float),
        velocities=np.array(velocities, dtype=float),
        rotations=empty_rotations,
        omegas=empty_omegas,
    )
    out_p = np.empty((batch, samples) + state.positions.shape[1:])
    out_v = np.empty_like(out_p)
    out_p[:, 0] = state.positions
    out_v[:, 0] = state.velocities

    def dynamics(t: float, s: SystemState) -> StateDerivative:
        accelerations = free_mass_accelerations(s.positions, s.velocities, topology, cable)
        accelerations[:, rows] = 0.0
        return StateDerivative(
            velocities=s.velocities,
            accelerations=accelerations,
            body_rates=empty_omegas,
            angular_accelerations=empty_omegas,
        )

    for k in range(samples - 1):
        start, end = boundary[:, k], boundary[:, k + 1]
        slope = (end - start) / step
        t0 = k * step

        def constrain(t: float, s: SystemState) -> SystemState:
            fraction = (t - t0) / step
            p = s.positions.copy()
            v = s.velocities.copy()
            p[:, rows] = start + fraction * (end - start)
            v[:, rows] = slope
            return SystemState(p, v, s.rotations, s.omegas)

        state = constrain(t0, state)
        for sub in range(substeps):
            state = rk4_step(state, dynamics, dt, t0 + sub * dt, constrain)
        out_p[:, k + 1] = state.positions
        out_v[:, k + 1] = state.velocities
    return out_p, out_v


@dataclass(frozen=True)
class SimLog:
    r"""Time series of a simulation run.

    ``references`` holds the desired position of every mass (NaN where there is
    none), ``reference_offsets`` the online shift of each robot reference.
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    forces: np.ndarray
    references: np.ndarray
    robots: Tuple[int, ...] = ()
    rotations: Optional[np.ndarray] = None
    omegas: Optional[np.ndarray] = None
    thrusts: Optional[np.ndarray] = None
    torques: Optional[np.ndarray] = None
    reference_offsets: Optional[np.ndarray] = None
    outputs: Tuple[int, ...] = ()
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def to_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        for name, array in (("p", self.positions), ("v", self.velocities)):
            for i in range(1, self.n + 1):
                for a, axis in enumerate(AXES):
                    data["{}{}_{}".format(name, i, axis)] = array[:, i - 1, a]
        for i in range(self.forces.shape[1]):
            for a, axis in enumerate(AXES):
                data["f{}_{}".format(i, axis)] = self.forces[:, i, a]
        for i in self.outputs:
            for a, axis in enumerate(AXES):
                data["ref{}_{}".format(i, axis)] = self.references[:, i - 1, a]
        if self.thrusts is not None:
            for slot, j in enumerate(self.robots):
                data["thrust{}".format(j)] = self.thrusts[:, slot]
                for name, array in (
                    ("tau", self.torques),
                    ("omega", self.omegas),
                    ("dref", self.reference_offsets),
                ):
                    for a, axis in enumerate(AXES):
                        data["{}{}_{}".format(name, j, axis)] = array[:, slot, a]
                for r in range(3):
                    for c in range(3):
                        data["R{}_{}{}".format(j, r, c)] = self.rotations[:, slot, r, c]
        return pd.DataFrame(data)

    def to_csv(self, path: Union[str, Path]) -> None:
        with Path(path).open("w") as f:
            for key in sorted(self.metadata):
                f.write("# {}: {}\n".format(key, self.metadata[key]))
            self.to_frame().to_csv(f, index=False, float_format="%.12g")

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, metadata: Optional[Dict] = None) -> "SimLog":
        if "t" not in frame.columns:
            raise SchemaError("simulation log has no 't' column")
        n = 0
        while "p{}_x".format(n + 1) in frame.columns:
            n += 1
        if n == 0:
            raise SchemaError("simulation log has no position columns")
        times = frame["t"].to_numpy()

        def block(prefix: str, indices) -> np.ndarray:
            return np.stack(
                [
                    frame[["{}{}_{}".format(prefix, i, a) for a in AXES]].to_numpy()
                    for i in indices
                ],
                axis=1,
            )

        outputs = tuple(i for i in range(1, n + 1) if "ref{}_x".format(i) in frame.columns)
        references = np.full((times.shape[0], n, 3), np.nan)
        if outputs:
            references[:, [i - 1 for i in outputs]] = block("ref", outputs)
        n_forces = sum(1 for i in range(n + 1) if "f{}_x".format(i) in frame.columns)
        try:
            return cls(
                times=times,
                positions=block("p", range(1, n + 1)),
                velocities=block("v", range(1, n + 1)),
                forces=block("f", range(n_forces)),
                references=references,
                outputs=outputs,
                metadata=dict(metadata or {}),
            )
        except KeyError as error:
            raise SchemaError("simulation log is missing column {}".format(error))

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "SimLog":
        metadata = {}
        with Path(path).open("r") as f:
            for line in f:
                if not line.startswith("#"):
                    break
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = value.strip()
        try:
            frame = pd.read_csv(path, comment="#")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as error:
            raise SchemaError("'{}' is not a simulation log: {}".format(path, error))
        return cls.from_frame(frame, metadata)


def output_error_metrics(
    log: SimLog, outputs: Optional[Sequence[int]] = None, start_fraction: float = 0.0
) -> pd.DataFrame:
    r"""Mean and maximum distance between simulated and reference output positions.

    Args:
        log: Simulation log with references
        outputs: Mass indices, the log's outputs by default
        start_fraction: Fraction of the run discarded at the start

    Returns:
        One row per output with columns ``output``, ``mean`` and ``max``
    """
    outputs = list(log.outputs if outputs is None else outputs)
    times = log.times
    start = times[0] + start_fraction * (times[-1] - times[0])
    keep = times >= start - 1e-12
    rows = []
    for i in outputs:
        error = np.linalg.norm(
            log.positions[keep, i - 1] - log.references[keep, i - 1], axis=-1
        )
        rows.append(
            {"output": "p{}".format(i), "mean": float(np.mean(error)), "max": float(np.max(error))}
        )
    return pd.DataFrame(rows, columns=["output", "mean", "max"])


class _PlanSampler:
    r"""Linear interpolation of a planned trajectory, held constant past its ends"""

    def __init__(self, plan) -> None:
        self.plan = plan
        self.times = plan.times

    def _weights(self, t: float):
        times = self.times
        if t <= times[0]:
            return 0, 0, 0.0
        if t >= times[-1]:
            last = len(times) - 1
            return last, last, 0.0
        k = int(np.searchsorted(times, t, side="right")) - 1
        fraction = (t - times[k]) / (times[k + 1] - times[k])
        return k, k + 1, fraction

    def sample(self, name: str, t: float) -> np.ndarray:
        k0, k1, fraction = self._weights(t)
        array = getattr(self.plan, name)
        return (1.0 - fraction) * array[k0] + fraction * array[k1]

    def reference(self, slot: int, row: int, t: float, offset=None) -> TrackingReference:
        p = self.sample("positions", t)[row]
        if offset is not None:
            p = p + offset
        return TrackingReference(
            p=p,
            v=self.sample("velocities", t)[row],
            a=self.sample("accelerations", t)[row],
            jerk=np.zeros(3),
            yaw=float(self.sample("yaws", t)[slot]),
            thrust_vector=self.sample("thrust_vectors", t)[slot],
            omega=self.sample("omegas", t)[slot],
            omega_dot=self.sample("omega_dots", t)[slot],
        )


def _apply_disturbance(config: SimConfig, positions: np.ndarray) -> np.ndarray:
    positions = positions.copy()
    for name, offset in config.disturbance.items():
        index = int(name[1:])
        if index < 1 or index > positions.shape[0]:
            raise InvalidConfig("disturbance on unknown point '{}'".format(name))
        positions[index - 1] += np.asarray(offset, dtype=float)
    return positions


def _metadata(config: SimConfig, cable: CableParams, extra: Optional[Dict] = None) -> Dict:
    metadata = {
        "mode": config.mode,
        "config_hash": document_hash(config.to_dict()),
        "params_hash": document_hash(cable.to_dict()),
    }
    metadata.update(extra or {})
    return metadata


def _initial_tracked_state(config: SimConfig, topology, cable, fleet, plan) -> SystemState:
    n_robots = len(fleet)
    if config.initial == "planned":
        state = SystemState(
            positions=plan.positions[0].copy(),
            velocities=plan.velocities[0].copy(),
            rotations=plan.rotations[0].copy(),
            omegas=plan.omegas[0].copy(),
        )
    elif config.initial == "equilibrium":
        boundary = {j: plan.positions[0, j - 1] for j in topology.robots}
        positions = static_equilibrium(topology, cable, boundary)
        state = SystemState.at_rest(positions, n_robots)
        state = SystemState(state.positions, state.velocities, plan.rotations[0].copy(), state.omegas)
    else:
        state = SystemState.at_rest(np.array(config.initial_positions, dtype=float), n_robots)
    if state.positions.shape != (topology.n, 3):
        raise InvalidConfig("initial positions must have shape ({}, 3)".format(topology.n))
    if config.at_rest:
        state = SystemState.at_rest(state.positions, n_robots)
        state = SystemState(
            state.positions, state.velocities, plan.rotations[0].copy(), state.omegas
        )
    return state.with_positions(_apply_disturbance(config, state.positions))


def _simulate_tracked(config: SimConfig, topology, cable, quads, plan, controller) -> SimLog:
    fleet = quads if isinstance(quads, RobotFleet) else RobotFleet(topology, cable, quads)
    sampler = _PlanSampler(plan)
    state = _initial_tracked_state(config, topology, cable, fleet, plan)
    outputs = config.outputs or default_outputs(topology, getattr(controller, "pair", None))
    dt = config.dt
    stride = max(1, int(round(1.0 / (config.log_rate * dt))))
    n_robots = len(fleet)
    offsets = np.zeros((n_robots, 3))
    rng = np.random.default_rng(config.seed)
    if controller is not None:
        controller.reset()
        control_stride = max(1, int(round(1.0 / (controller.rate * dt))))
    records: Dict[str, List] = {
        name: []
        for name in (
            "times",
            "positions",
            "velocities",
            "forces",
            "references",
            "rotations",
            "omegas",
            "thrusts",
            "torques",
            "offsets",
        )
    }
    for step in range(config.n_steps + 1):
        t = step * dt
        if controller is not None and step % control_stride == 0:
            measured = state.positions
            if config.noise_std > 0:
                measured = measured + rng.normal(0.0, config.noise_std, measured.shape)
            offsets = controller.update(t, measured)
        thrusts = np.empty(n_robots)
        torques = np.empty((n_robots, 3))
        for slot, (j, quad) in enumerate(fleet):
            reference = sampler.reference(slot, j - 1, t, offsets[slot])
            command = geometric_tracking_control(
                state.robot(slot, j), reference, quad, cable, config.gains
            )
            thrusts[slot] = command.f
            torques[slot] = command.tau
        forces = segment_forces(state.positions, topology, cable)
        if step % stride == 0:
            records["times"].append(t)
            records["positions"].append(state.positions)
            records["velocities"].append(state.velocities)
            records["forces"].append(forces)
            records["references"].append(sampler.sample("positions", t))
            records["rotations"].append(state.rotations)
            records["omegas"].append(state.omegas)
            records["thrusts"].append(thrusts)
            records["torques"].append(torques)
            records["offsets"].append(offsets.copy())
        if step == config.n_steps:
            break

        def dynamics(tau: float, s: SystemState, thrusts=thrusts, torques=torques):
            return system_dynamics(s, thrusts, torques, fleet)

        state = rk4_step(state, dynamics, dt, t)
        speed = float(np.max(np.linalg.norm(state.velocities, axis=-1)))
        if speed > config.v_max:
            raise InstabilityDetected(
                "speed {:.3g} m/s exceeds {:g} m/s".format(speed, config.v_max),
                time=t + dt,
                index=int(np.argmax(np.linalg.norm(state.velocities, axis=-1))) + 1,
            )
    return SimLog(
        times=np.array(records["times"]),
        positions=np.array(records["positions"]),
        velocities=np.array(records["velocities"]),
        forces=np.array(records["forces"]),
        references=np.array(records["references"]),
        robots=tuple(topology.robots),
        rotations=np.array(records["rotations"]),
        omegas=np.array(records["omegas"]),
        thrusts=np.array(records["thrusts"]),
        torques=np.array(records["torques"]),
        reference_offsets=np.array(records["offsets"]),
        outputs=tuple(outputs),
        metadata=_metadata(config, cable),
    )


def _simulate_boundary_driven(config: SimConfig, topology, cable, boundary: BoundarySignals) -> SimLog:
    if tuple(sorted(boundary.indices)) != tuple(sorted(topology.robots)):
        raise InvalidConfig(
            "boundary signals drive {} but the robots are {}".format(
                boundary.indices, topology.robots
            )
        )
    step = boundary.step
    substeps = max(1, int(round(step / config.dt)))
    samples = min(len(boundary.times), int(round(config.duration / step)) + 1)
    positions = boundary.positions[:samples]
    if config.initial == "equilibrium":
        fixed = {j: positions[0, j - 1] for j in boundary.indices}
        start_p = static_equilibrium(topology, cable, fixed)
        start_v = np.zeros_like(start_p)
    elif config.initial == "explicit":
        start_p = np.array(config.initial_positions, dtype=float)
        start_v = np.zeros_like(start_p)
    else:
        start_p = positions[0].copy()
        start_v = boundary.velocities()[0]
        if np.any(np.isnan(start_p)):
            raise InvalidConfig("the measured initial state has unknown positions")
    if config.at_rest:
        start_v = np.zeros_like(start_v)
    start_p = _apply_disturbance(config, start_p)
    p, v = rollout_batch(
        start_p[None],
        start_v[None],
        positions[None][:, :, boundary.rows],
        step,
        topology,
        cable,
        boundary.rows,
        substeps,
    )
    p, v = p[0], v[0]
    speeds = np.linalg.norm(v, axis=-1)
    if not np.all(np.isfinite(p)) or np.max(speeds) > config.v_max:
        bad = np.argwhere(~np.isfinite(speeds) | (speeds > config.v_max))[0]
        raise InstabilityDetected(
            "cable rollout diverged", time=float(boundary.times[bad[0]]), index=int(bad[1]) + 1
        )
    return SimLog(
        times=boundary.times[:samples],
        positions=p,
        velocities=v,
        forces=segment_forces(p, topology, cable),
        references=positions,
        outputs=tuple(config.outputs or topology.free_masses),
        metadata=_metadata(config, cable, {"substeps": str(substeps)}),
    )


def simulate(
    config: SimConfig,
    topology,
    cable: CableParams,
    quads=None,
    plan=None,
    boundary: Optional[BoundarySignals] = None,
    controller=None,
) -> SimLog:
    r"""Run a simulation.

    Args:
        config: Simulation settings
        topology: Cable topology
        cable: Cable parameters of the simulated plant
        quads: Robot parameters, tracked and closed-loop modes
        plan: Planned trajectory, tracked and closed-loop modes; in
            boundary-driven mode it can replace ``boundary``
        boundary: Prescribed boundary motion, boundary-driven mode
        controller: Output-feedback controller with ``rate``, ``reset()`` and
            ``update(t, positions)``, closed-loop mode

    Returns:
        The simulation log
    """
    cable.check(topology)
    config.check_step(cable)
    logger.info("simulating %s for %.2f s in %s mode", topology, config.duration, config.mode)
    if config.mode == "boundary_driven":
        if boundary is None:
            if plan is None:
                raise InvalidConfig("boundary-driven simulation needs boundary signals")
            boundary = BoundarySignals.from_plan(plan)
        return _simulate_boundary_driven(config, topology, cable, boundary)
    if plan is None or quads is None:
        raise InvalidConfig("{} simulation needs a plan and robot parameters".format(config.mode))
    if config.mode == "closed_loop":
        if controller is None:
            raise InvalidConfig("closed-loop simulation needs a controller")
    else:
        controller = None
    return _simulate_tracked(config, topology, cable, quads, plan, controller)
