r"""Cable parameter identification by homotopy-weighted shooting.

The cost blends two predictions of the interior points: a multi-step rollout
re-initialised from the measurements only at window starts, and a one-step
prediction re-initialised at every sample. The weight moves from the smooth
one-step term to the multi-step term over the stages of a homotopy schedule.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from cableflat.errors import (
    InvalidConfig,
    InvalidLambda,
    NoDescent,
    NonFiniteDerivative,
    SeparationTooSmall,
)
from cableflat.model.params import CableParams
from cableflat.parse.utilities import check_keys
from cableflat.simulation.simulator import rollout_batch
from cableflat.sysid.dataset import ROLLOUT_SUBSTEPS, MocapDataset

__all__ = [
    "ThetaVector",
    "HomotopySchedule",
    "IdentificationConfig",
    "IdentificationReport",
    "rollout",
    "one_step_predictions",
    "cost_terms",
    "homotopy_cost",
    "sensitivity",
    "identify",
]

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
NEAR_ZERO = 1e-6
DIVERGED_COST = 1e20


@dataclass(frozen=True)
class ThetaVector:
    r"""Unknown cable parameters: one stiffness per segment and a shared damping.

    Args:
        k: Stiffnesses of segments 1..n-1 in N/m
        c: Viscous coefficient shared by every point in N s/m
        upper: Upper bound of every entry, same layout as :meth:`as_array`
    """

    k: np.ndarray
    c: float
    upper: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        k = np.array(self.k, dtype=float)
        if k.ndim != 1 or k.shape[0] == 0:
            raise InvalidConfig("'k' must be a non-empty list")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", float(self.c))
        values = self.as_array()
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise InvalidConfig("identified parameters must be strictly positive")
        if self.upper is not None:
            upper = np.array(self.upper, dtype=float)
            if upper.shape != values.shape:
                raise InvalidConfig("'upper' must bound every parameter")
            if np.any(values > upper * (1 + 1e-12)):
                raise InvalidConfig("parameters exceed their upper bounds")
            object.__setattr__(self, "upper", upper)

    @property
    def size(self) -> int:
        return self.k.shape[0] + 1

    @property
    def names(self) -> List[str]:
        return ["k{}".format(i) for i in range(1, self.k.shape[0] + 1)] + ["c"]

    def as_array(self) -> np.ndarray:
        return np.append(self.k, self.c)

    def with_array(self, values) -> "ThetaVector":
        values = np.asarray(values, dtype=float)
        return ThetaVector(k=values[:-1], c=values[-1], upper=self.upper)

    def with_upper(self, factor: float) -> "ThetaVector":
        return ThetaVector(k=self.k, c=self.c, upper=self.as_array() * factor)

    def cable(self, dataset: MocapDataset, total_mass: float) -> CableParams:
        return dataset.cable(self.k, self.c, total_mass)

    def to_dict(self) -> Dict:
        return {"k": self.k.tolist(), "c": self.c}

    @classmethod
    def from_dict(cls, data: Dict) -> "ThetaVector":
        check_keys(data, ("k", "c"), (), "theta")
        return cls(k=data["k"], c=data["c"])


@dataclass(frozen=True)
class HomotopySchedule:
    r"""Decreasing homotopy weights with the optimiser limits of every stage"""

    lambdas: Tuple[float, ...] = (0.9, 0.5, 0.2, 0.05)
    max_iter: int = 60
    tol: float = 1e-10

    def __post_init__(self) -> None:
        lambdas = tuple(float(value) for value in self.lambdas)
        if not lambdas:
            raise InvalidLambda("the homotopy schedule is empty")
        for value in lambdas:
            _check_lambda(value)
        if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
            raise InvalidLambda("homotopy weights must decrease strictly")
        if self.max_iter < 1 or not self.tol > 0:
            raise InvalidConfig("'max_iter' and 'tol' must be positive")
        object.__setattr__(self, "lambdas", lambdas)

    @classmethod
    def from_dict(cls, data: Dict) -> "HomotopySchedule":
        check_keys(data, (), ("lambdas", "max_iter", "tol"), "schedule")
        return cls(**data)


def _check_lambda(value: float) -> None:
    if not 0.0 < value < 1.0:
        raise InvalidLambda("homotopy weight must lie in (0, 1), got {}".format(value))


@dataclass(frozen=True)
class IdentificationConfig:
    r"""Settings of an identification run.

    Args:
        total_mass: Cable mass in kg, spread uniformly over the points
        theta0: Initial guess
        schedule: Homotopy schedule
        window: Multi-step window in s; ``None`` integrates the whole dataset
            from its first sample
        substeps: Integration steps per sample interval
        weights: Diagonal of the position error weight
        upper_factor: Upper bound of every parameter relative to ``theta0``
    """

    total_mass: float
    theta0: ThetaVector
    schedule: HomotopySchedule = field(default_factory=HomotopySchedule)
    window: Optional[float] = 2.0
    substeps: int = ROLLOUT_SUBSTEPS
    weights: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    upper_factor: float = 10.0

    def __post_init__(self) -> None:
        if not self.total_mass > 0:
            raise InvalidConfig("'total_mass' must be positive")
        if self.window is not None and not self.window > 0:
            raise InvalidConfig("'window' must be positive")
        if self.substeps < 1:
            raise InvalidConfig("'substeps' must be at least 1")
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != 3 or any(w <= 0 for w in weights):
            raise InvalidConfig("'weights' must be three positive numbers")
        if not self.upper_factor > 1:
            raise InvalidConfig("'upper_factor' must exceed 1")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_dict(cls, data: Dict) -> "IdentificationConfig":
        check_keys(
            data,
            ("total_mass", "theta0"),
            ("schedule", "window", "substeps", "weights", "upper_factor", "description"),
            "identification",
        )
        data = {k: v for k, v in data.items() if k != "description"}
        data["theta0"] = ThetaVector.from_dict(data["theta0"])
        if "schedule" in data:
            data["schedule"] = HomotopySchedule.from_dict(data["schedule"])
        return cls(**data)

    def to_dict(self) -> Dict:
        return {
            "total_mass": self.total_mass,
            "theta0": self.theta0.to_dict(),
            "schedule": {
                "lambdas": list(self.schedule.lambdas),
                "max_iter": self.schedule.max_iter,
                "tol": self.schedule.tol,
            },
            "window": self.window,
            "substeps": self.substeps,
            "weights": list(self.weights),
            "upper_factor": self.upper_factor,
        }


def _shoot(cable: CableParams, dataset: MocapDataset, starts, length: int, substeps: int):
    rows = [i - 1 for i in dataset.boundary]
    starts = np.asarray(starts, dtype=int)
    indices = starts[:, None] + np.arange(length)
    positions, _ = rollout_batch(
        dataset.positions[starts],
        dataset.velocities[starts],
        dataset.positions[indices][:, :, rows],
        dataset.step,
        dataset.topology,
        cable,
        rows,
        substeps,
    )
    return positions


def rollout(
    theta: ThetaVector,
    dataset: MocapDataset,
    total_mass: float,
    window: Optional[float] = 2.0,
    substeps: int = ROLLOUT_SUBSTEPS,
) -> np.ndarray:
    r"""Multi-step prediction of every point.

    The cable is integrated under the measured boundary motion from the measured
    state at the start of every window.

    Args:
        theta: Cable parameters
        dataset: Measurements
        total_mass: Cable mass in kg
        window: Window length in s, ``None`` for a single window
        substeps: Integration steps per sample interval

    Returns:
        Predicted positions, shape (T, n, 3)
    """
    cable = theta.cable(dataset, total_mass)
    total = dataset.n_samples
    length = total if window is None else max(2, int(round(window * dataset.rate)))
    length = min(length, total)
    starts = np.arange(0, total, length)
    full = starts[starts + length <= total]
    predicted = np.empty_like(dataset.positions)
    if full.size:
        shots = _shoot(cable, dataset, full, length, substeps)
        for start, shot in zip(full, shots):
            predicted[start : start + length] = shot
    remainder = starts[starts + length > total]
    for start in remainder:
        predicted[start:] = _shoot(cable, dataset, [start], total - start, substeps)[0]
    return predicted


def one_step_predictions(
    theta: ThetaVector,
    dataset: MocapDataset,
    total_mass: float,
    substeps: int = ROLLOUT_SUBSTEPS,
) -> np.ndarray:
    r"""Prediction of every sample from the measured state one sample earlier.

    The first sample has no predecessor and is returned as measured.
    """
    cable = theta.cable(dataset, total_mass)
    starts = np.arange(dataset.n_samples - 1)
    shots = _shoot(cable, dataset, starts, 2, substeps)
    predicted = np.empty_like(dataset.positions)
    predicted[0] = dataset.positions[0]
    predicted[1:] = shots[:, 1]
    return predicted


def cost_terms(
    predicted, one_step, measured, interior: Sequence[int], weights=(1.0, 1.0, 1.0)
) -> Tuple[float, float]:
    r"""Weighted squared errors of the interior points.

    Returns:
        The multi-step and the one-step sums
    """
    rows = [i - 1 for i in interior]
    W = np.asarray(weights, dtype=float)
    measured = np.asarray(measured)[:, rows]
    multi = np.asarray(predicted)[:, rows] - measured
    single = np.asarray(one_step)[:, rows] - measured
    return float(np.sum(W * multi * multi)), float(np.sum(W * single * single))


def homotopy_cost(
    theta: ThetaVector,
    lam: float,
    dataset: MocapDataset,
    total_mass: float,
    weights=(1.0, 1.0, 1.0),
    window: Optional[float] = 2.0,
    substeps: int = ROLLOUT_SUBSTEPS,
) -> float:
    r"""``multi / lam + one_step / (1 - lam)`` over the interior points"""
    _check_lambda(lam)
    multi, single = cost_terms(
        rollout(theta, dataset, total_mass, window, substeps),
        one_step_predictions(theta, dataset, total_mass, substeps),
        dataset.positions,
        dataset.interior,
        weights,
    )
    return multi / lam + single / (1.0 - lam)


class _Objective:
    r"""Homotopy cost in log-parameters with forward-difference gradients"""

    def __init__(self, theta: ThetaVector, dataset: MocapDataset, config: IdentificationConfig):
        self.theta = theta
        self.dataset = dataset
        self.config = config
        self.evaluations = 0

    def value(self, x, lam: float) -> float:
        self.evaluations += 1
        values = np.exp(x)
        theta = ThetaVector(k=values[:-1], c=values[-1])
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                cost = homotopy_cost(
                    theta,
                    lam,
                    self.dataset,
                    self.config.total_mass,
                    self.config.weights,
                    self.config.window,
                    self.config.substeps,
                )
        except (NonFiniteDerivative, SeparationTooSmall):
            return DIVERGED_COST
        return cost if np.isfinite(cost) else DIVERGED_COST

    def gradient(self, x, lam: float, base: Optional[float] = None) -> Tuple[float, np.ndarray]:
        if base is None:
            base = self.value(x, lam)
        gradient = np.empty_like(x)
        for j in range(x.shape[0]):
            shifted = x.copy()
            shifted[j] += FD_STEP
            gradient[j] = (self.value(shifted, lam) - base) / FD_STEP
        return base, gradient


@dataclass
class StageReport:
    lam: float
    start_cost: float
    end_cost: float
    iterations: int
    message: str

    def to_dict(self) -> Dict:
        return {
            "lambda": self.lam,
            "start_cost": self.start_cost,
            "end_cost": self.end_cost,
            "iterations": self.iterations,
            "message": self.message,
        }


@dataclass
class IdentificationReport:
    r"""Identified parameters with the diagnostics of the fit.

    ``errors`` holds the distance between predicted and measured positions of
    every interior point at every sample.
    """

    theta: ThetaVector
    stages: List[StageReport]
    rest_lengths: np.ndarray
    mass: float
    times: np.ndarray
    interior: Tuple[int, ...]
    errors: np.ndarray
    mean_coordinate_error: float
    sensitivity: Dict[str, float]
    filled: int = 0
    window: Optional[float] = 2.0
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def near_zero(self) -> List[str]:
        largest = max(abs(value) for value in self.sensitivity.values())
        return [
            name
            for name, value in self.sensitivity.items()
            if abs(value) <= NEAR_ZERO * largest
        ]

    def error_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.errors, columns=["e{}".format(i) for i in self.interior]
        )
        frame.insert(0, "t", self.times)
        return frame

    def to_dict(self) -> Dict:
        return {
            "theta": self.theta.to_dict(),
            "rest_lengths": self.rest_lengths.tolist(),
            "mass": self.mass,
            "stages": [stage.to_dict() for stage in self.stages],
            "errors": {
                "p{}".format(i): {
                    "mean": float(np.mean(self.errors[:, slot])),
                    "max": float(np.max(self.errors[:, slot])),
                }
                for slot, i in enumerate(self.interior)
            },
            "mean_coordinate_error": self.mean_coordinate_error,
            "sensitivity": self.sensitivity,
            "near_zero_sensitivity": self.near_zero,
            "filled_samples": self.filled,
            "window": self.window,
            "metadata": self.metadata,
        }


def sensitivity(
    theta: ThetaVector, lam: float, dataset: MocapDataset, config: IdentificationConfig
) -> Dict[str, float]:
    r"""Relative cost sensitivity ``theta_j dJ/dtheta_j`` of every parameter"""
    objective = _Objective(theta, dataset, config)
    _, gradient = objective.gradient(np.log(theta.as_array()), lam)
    return dict(zip(theta.names, (float(g) for g in gradient)))


def identify(dataset: MocapDataset, config: IdentificationConfig) -> IdentificationReport:
    r"""Identify stiffnesses and damping by a staged homotopy minimisation.

    Every stage minimises the homotopy cost for its weight with L-BFGS-B in
    log-parameters, warm-started from the previous stage, and must not end
    above its starting cost.

    Args:
        dataset: Boundary-driven measurements
        config: Identification settings

    Returns:
        The identification report
    """
    theta = config.theta0.with_upper(config.upper_factor)
    if theta.k.shape[0] != dataset.n - 1:
        raise InvalidConfig(
            "{} stiffnesses given for a cable of {} points".format(theta.k.shape[0], dataset.n)
        )
    objective = _Objective(theta, dataset, config)
    x = np.log(theta.as_array())
    lower = np.log(theta.as_array() / config.upper_factor ** 3)
    bounds = list(zip(lower, np.log(theta.upper)))
    stages = []
    for index, lam in enumerate(config.schedule.lambdas):
        start = objective.value(x, lam)
        scale = start if start > 0 else 1.0

        def scaled(z, lam=lam, scale=scale):
            value, gradient = objective.gradient(z, lam)
            return value / scale, gradient / scale

        result = minimize(
            scaled,
            x,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={
                "maxiter": config.schedule.max_iter,
                "ftol": config.schedule.tol,
                "gtol": config.schedule.tol,
            },
        )
        end = objective.value(result.x, lam)
        if end > start:
            raise NoDescent(
                "cost rose from {:.6g} to {:.6g}".format(start, end), stage=index
            )
        stages.append(StageReport(lam, start, end, int(result.nit), str(result.message)))
        logger.info(
            "homotopy stage %d (lambda=%.3g): cost %.6g -> %.6g in %d iterations",
            index,
            lam,
            start,
            end,
            result.nit,
        )
        x = result.x
    theta = theta.with_array(np.exp(x))
    predicted = rollout(theta, dataset, config.total_mass, config.window, config.substeps)
    rows = [i - 1 for i in dataset.interior]
    difference = predicted[:, rows] - dataset.positions[:, rows]
    logger.info("identification used %d cost evaluations", objective.evaluations)
    return IdentificationReport(
        theta=theta,
        stages=stages,
        rest_lengths=dataset.rest_lengths(),
        mass=config.total_mass / dataset.n,
        times=dataset.times,
        interior=dataset.interior,
        errors=np.linalg.norm(difference, axis=-1),
        mean_coordinate_error=float(np.mean(np.abs(difference))),
        sensitivity=sensitivity(theta, config.schedule.lambdas[-1], dataset, config),
        filled=dataset.filled,
        window=config.window,
    )
