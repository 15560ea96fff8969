r"""Output feedback around the flatness recursion.

The class C recursion is re-run at every control tick with an integral term on
the output errors added to the first position computed on each side of the
output pair. The corrected positions then propagate to the robots at the two
cable ends, whose shifted positions become the new references.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from cableflat.errors import InvalidConfig
from cableflat.flatness.planner import FlatOutputs, plan_class_c, required_depth
from cableflat.model.params import CableParams
from cableflat.model.system import RobotFleet
from cableflat.parse.utilities import check_keys

__all__ = [
    "IntegralState",
    "GainConfig",
    "integral_update",
    "deviation_bound",
    "replan_step",
    "ClosedLoopController",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegralState:
    r"""Accumulated output error ``int e dt`` of one output, clamped per axis.

    Args:
        value: Accumulated error in m s
        bound: Anti-windup clamp in m s
    """

    value: np.ndarray = field(default_factory=lambda: np.zeros(3))
    bound: float = 1.0

    def __post_init__(self) -> None:
        if not self.bound > 0:
            raise InvalidConfig("the integral clamp must be positive")
        value = np.array(self.value, dtype=float)
        if value.shape != (3,):
            raise InvalidConfig("the integral state is a 3-vector")
        object.__setattr__(self, "value", value)

    @property
    def saturated(self) -> bool:
        return bool(np.any(np.abs(self.value) >= self.bound))


@dataclass(frozen=True)
class GainConfig:
    r"""Integral gains of the output feedback.

    Args:
        K: Diagonal of the integral gain matrix in 1/s; zero disables an axis
        rate: Controller update rate in Hz
        clamp: Anti-windup bound of every accumulator in m s
    """

    K: Tuple[float, float, float] = (0.2, 0.2, 0.2)
    rate: float = 100.0
    clamp: float = 1.0

    def __post_init__(self) -> None:
        K = tuple(float(k) for k in np.broadcast_to(np.asarray(self.K, dtype=float), (3,)))
        if any(k < 0 for k in K):
            raise InvalidConfig("integral gains must be non-negative")
        if not self.rate > 0 or not self.clamp > 0:
            raise InvalidConfig("'rate' and 'clamp' must be positive")
        object.__setattr__(self, "K", K)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.K)

    @property
    def dt(self) -> float:
        return 1.0 / self.rate

    @classmethod
    def from_dict(cls, data: Dict) -> "GainConfig":
        check_keys(data, (), ("K", "rate", "clamp"), "controller")
        return cls(**data)

    def to_dict(self) -> Dict:
        return {"K": list(self.K), "rate": self.rate, "clamp": self.clamp}


def integral_update(state: IntegralState, error, dt: float) -> IntegralState:
    r"""Rectangle-rule accumulation ``value + e dt`` followed by the per-axis clamp"""
    if not dt > 0:
        raise InvalidConfig("'dt' must be positive")
    raw = state.value + np.asarray(error, dtype=float) * dt
    value = np.clip(raw, -state.bound, state.bound)
    if np.any(value != raw):
        logger.debug("integral state clamped at %.3g m s", state.bound)
    return replace(state, value=value)


def deviation_bound(gains: GainConfig) -> float:
    r"""Largest distance between a corrected and an open-loop robot reference.

    The correction is a rigid translation of the chain beyond the output pair,
    so the deviation is at most ``max(K) * clamp * sqrt(3)``.
    """
    return float(max(gains.K) * gains.clamp * np.sqrt(3.0))


def _corrections(pair, states: Dict[int, IntegralState], gains: GainConfig) -> Dict[int, np.ndarray]:
    i, i_next = pair
    K = gains.matrix
    return {
        i_next + 1: K @ states[i_next].value,
        i - 1: K @ states[i].value,
    }


def replan_step(
    flat: FlatOutputs,
    t: float,
    measured,
    states: Dict[int, IntegralState],
    gains: GainConfig,
    topology,
    cable: CableParams,
    quads,
    depth: Optional[int] = None,
    branch: str = "tension",
) -> Tuple[np.ndarray, Dict[int, IntegralState]]:
    r"""One tick of the output feedback.

    The output errors ``e_i = p_i^d - p_i`` update the integral states, whose
    weighted values shift the position right after the output pair on each
    side: ``int e_{i+1}`` drives point ``i+2`` and ``int e_i`` drives point ``i-1``.

    Args:
        flat: Desired class C flat outputs
        t: Current time in s
        measured: Measured positions of all masses, shape (n, 3)
        states: Integral state per output index
        gains: Integral gains
        topology: Class C topology
        cable: Cable parameters used for replanning
        quads: Robot parameters
        depth: Jet depth, the minimum the recursion needs when omitted
        branch: Spring inversion branch

    Returns:
        Corrected robot positions, shape (n_R, 3), and the updated states
    """
    if topology.system_class != "C":
        raise InvalidConfig("output feedback is implemented for class C systems")
    pair = tuple(flat.pair)
    measured = np.asarray(measured, dtype=float)
    times = np.array([t], dtype=float)
    states = dict(states)
    for i in pair:
        error = flat.positions(i, times)[0] - measured[i - 1]
        states[i] = integral_update(states[i], error, gains.dt)
    if depth is None:
        depth = required_depth(topology, pair)
    replanned = plan_class_c(
        flat,
        topology,
        cable,
        quads,
        times,
        depth=depth,
        branch=branch,
        corrections=_corrections(pair, states, gains),
    )
    return replanned.robot_positions()[0], states


class ClosedLoopController:
    r"""Integral output feedback driving the robot references of a class C plan.

    The controller keeps one :class:`IntegralState` per output and returns at
    each tick the shift of every robot reference with respect to the open-loop
    plan evaluated by the same recursion, so that zero gains give zero shifts.
    """

    def __init__(
        self,
        flat: FlatOutputs,
        topology,
        cable: CableParams,
        quads,
        gains: GainConfig = GainConfig(),
        branch: str = "tension",
    ) -> None:
        if flat.pair is None:
            raise InvalidConfig("the closed loop needs class C flat outputs with a pair")
        self.flat = flat
        self.pair = tuple(flat.pair)
        self.topology = topology
        self.cable = cable
        self.fleet = quads if isinstance(quads, RobotFleet) else RobotFleet(topology, cable, quads)
        self.gains = gains
        self.branch = branch
        self.depth = required_depth(topology, self.pair)
        self.bound = deviation_bound(gains)
        self.reset()

    @property
    def rate(self) -> float:
        return self.gains.rate

    def reset(self) -> None:
        self.states = {i: IntegralState(bound=self.gains.clamp) for i in self.pair}

    def open_loop(self, t: float) -> np.ndarray:
        plan = plan_class_c(
            self.flat,
            self.topology,
            self.cable,
            self.fleet,
            np.array([t]),
            depth=self.depth,
            branch=self.branch,
            corrections={i: np.zeros(3) for i in (self.pair[0] - 1, self.pair[1] + 1)},
        )
        return plan.robot_positions()[0]

    def update(self, t: float, measured) -> np.ndarray:
        r"""Advance the integral states and return the robot reference shifts, shape (n_R, 3)"""
        corrected, self.states = replan_step(
            self.flat,
            t,
            measured,
            self.states,
            self.gains,
            self.topology,
            self.cable,
            self.fleet,
            depth=self.depth,
            branch=self.branch,
        )
        offsets = corrected - self.open_loop(t)
        largest = float(np.max(np.linalg.norm(offsets, axis=-1)))
        if largest > self.bound * (1.0 + 1e-9) + 1e-12:
            logger.warning(
                "reference shift %.3g m exceeds the expected bound %.3g m", largest, self.bound
            )
        return offsets
