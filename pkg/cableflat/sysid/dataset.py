r"""Motion-capture datasets of a cable held at both ends.

The CSV schema is a header ``t,p1x,p1y,p1z,...,p<n>x,p<n>y,p<n>z`` with times in
seconds and positions in meters. Missing marker samples are empty cells.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.signal import savgol_filter

from cableflat.errors import ExcessiveGaps, InvalidConfig, SchemaError
from cableflat.graph.topology import Topology
from cableflat.model.cable import static_equilibrium
from cableflat.model.params import CableParams
from cableflat.simulation.simulator import rollout_batch

__all__ = [
    "ROLLOUT_SUBSTEPS",
    "MocapDataset",
    "preprocess",
    "synthetic_dataset",
    "position_columns",
]

logger = logging.getLogger(__name__)

UNIFORM_TOLERANCE = 1e-6
# RK4 steps per recorded sample, shared by synthesis and identification
ROLLOUT_SUBSTEPS = 4


def position_columns(n: int):
    return ["p{}{}".format(i, a) for i in range(1, n + 1) for a in "xyz"]


@dataclass(frozen=True)
class MocapDataset:
    r"""Uniformly sampled positions of every cable point.

    Args:
        times: Sample times, shape (T,)
        positions: Shape (T, n, 3)
        velocities: Finite-difference velocities, shape (T, n, 3)
        rate: Sampling rate in Hz
        boundary: Indices of the points moved by the robots, the inputs
        filled: Number of samples filled by gap interpolation
        l0: Rest lengths the recording is known to have, one per segment;
            the mean separations are used when absent
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    rate: float
    boundary: Tuple[int, ...] = ()
    filled: int = 0
    l0: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.positions.ndim != 3 or self.positions.shape[2] != 3:
            raise SchemaError("dataset positions must have shape (T, n, 3)")
        if self.positions.shape[0] < 3:
            raise SchemaError("a dataset needs at least three samples")
        if not self.boundary:
            object.__setattr__(self, "boundary", (1, self.n))
        if self.l0 is not None:
            l0 = np.array(self.l0, dtype=float)
            if l0.shape != (self.n - 1,) or np.any(l0 <= 0):
                raise SchemaError(
                    "declared rest lengths must be {} positive numbers".format(self.n - 1)
                )
            object.__setattr__(self, "l0", l0)

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def n_samples(self) -> int:
        return self.positions.shape[0]

    @property
    def step(self) -> float:
        return 1.0 / self.rate

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def interior(self) -> Tuple[int, ...]:
        r"""Points that are not inputs, the outputs of the identification"""
        return tuple(i for i in range(1, self.n + 1) if i not in self.boundary)

    @property
    def topology(self) -> Topology:
        return Topology.build("C", self.n, self.boundary)

    def mean_separations(self) -> np.ndarray:
        r"""Mean distance between the two ends of every segment over the dataset"""
        separations = np.linalg.norm(np.diff(self.positions, axis=1), axis=-1)
        return separations.mean(axis=0)

    def rest_lengths(self) -> np.ndarray:
        if self.l0 is not None:
            return self.l0
        return self.mean_separations()

    def cable(self, k, c: float, total_mass: float) -> CableParams:
        r"""Cable parameters with the dataset rest lengths and a uniform mass"""
        return CableParams(
            n=self.n,
            k=k,
            l0=self.rest_lengths(),
            mass=np.full(self.n, total_mass / self.n),
            c=np.full(self.n, c),
        )

    def window(self, start: int, stop: int) -> "MocapDataset":
        return MocapDataset(
            times=self.times[start:stop],
            positions=self.positions[start:stop],
            velocities=self.velocities[start:stop],
            rate=self.rate,
            boundary=self.boundary,
            l0=self.l0,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.positions.reshape(self.n_samples, -1), columns=position_columns(self.n)
        )
        frame.insert(0, "t", self.times)
        return frame

    def to_csv(self, path: Union[str, Path]) -> None:
        with Path(path).open("w") as f:
            if self.l0 is not None:
                f.write("# rest_lengths: {}\n".format(",".join("%.12g" % v for v in self.l0)))
            self.to_frame().to_csv(f, index=False, float_format="%.12g")


def _header(path) -> Optional[np.ndarray]:
    r"""Rest lengths declared in the leading comment lines of a marker CSV"""
    with Path(path).open("r") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            if key.strip() == "rest_lengths":
                try:
                    return np.array([float(v) for v in value.split(",")])
                except ValueError:
                    raise SchemaError("unreadable rest lengths '{}'".format(value.strip()))
    return None


def _read(source) -> Tuple[pd.DataFrame, Optional[np.ndarray]]:
    if isinstance(source, pd.DataFrame):
        return source.copy(), None
    try:
        return pd.read_csv(source, comment="#"), _header(source)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as error:
        raise SchemaError("'{}' is not a marker CSV: {}".format(source, error))


def _check_schema(frame: pd.DataFrame) -> int:
    columns = [str(c).strip() for c in frame.columns]
    if not columns or columns[0] != "t":
        raise SchemaError("marker CSV must start with a 't' column")
    positions = columns[1:]
    if len(positions) == 0 or len(positions) % 3 != 0:
        raise SchemaError("marker CSV must hold three columns per point")
    n = len(positions) // 3
    if positions != position_columns(n):
        raise SchemaError(
            "marker CSV columns must be {}, got {}".format(position_columns(n), positions)
        )
    if n < 3:
        raise SchemaError("identification needs at least one interior point")
    return n


def _fill_gaps(frame: pd.DataFrame, max_gap: int) -> Tuple[pd.DataFrame, int]:
    values = frame.drop(columns="t")
    missing = values.isna().any(axis=1)
    if missing.iloc[0] or missing.iloc[-1]:
        raise ExcessiveGaps("the first and last samples must be complete")
    runs = (missing != missing.shift()).cumsum()[missing]
    longest = int(runs.value_counts().max()) if len(runs) else 0
    if longest > max_gap:
        raise ExcessiveGaps(
            "gap of {} samples exceeds the limit of {}".format(longest, max_gap)
        )
    filled = int(missing.sum())
    if filled:
        logger.warning("filled %d missing samples by linear interpolation", filled)
        values = values.interpolate(method="linear", limit_area="inside")
    result = values.copy()
    result.insert(0, "t", frame["t"].to_numpy())
    return result, filled


def preprocess(
    source,
    boundary: Optional[Sequence[int]] = None,
    max_gap: int = 10,
    smoothing: Optional[int] = None,
    rate: Optional[float] = None,
    rest_lengths: Optional[Sequence[float]] = None,
) -> MocapDataset:
    r"""Load and clean a marker CSV.

    Args:
        source: Path of the CSV or an already loaded frame
        boundary: Points driven by the robots, both ends by default
        max_gap: Longest run of missing samples that is interpolated
        smoothing: Odd Savitzky-Golay window length in samples, no smoothing by default
        rate: Resampling rate in Hz, the median rate of the file by default
        rest_lengths: Known rest lengths, overriding a ``# rest_lengths:`` header
            line of the file

    Returns:
        The dataset on a uniform grid with finite-difference velocities
    """
    frame, declared = _read(source)
    if rest_lengths is not None:
        declared = rest_lengths
    frame.columns = [str(c).strip() for c in frame.columns]
    n = _check_schema(frame)
    try:
        frame = frame.astype(float)
    except ValueError as error:
        raise SchemaError("marker CSV holds non-numeric values: {}".format(error))
    if frame["t"].isna().any():
        raise SchemaError("marker CSV has missing times")
    times = frame["t"].to_numpy()
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise SchemaError("marker times must increase strictly")
    frame, filled = _fill_gaps(frame, max_gap)
    values = frame.drop(columns="t").to_numpy()
    median = float(np.median(steps))
    if rate is None:
        rate = 1.0 / median
    uniform = np.max(np.abs(steps - 1.0 / rate)) < UNIFORM_TOLERANCE
    if not uniform:
        count = int(np.floor((times[-1] - times[0]) * rate + 1e-9)) + 1
        grid = times[0] + np.arange(count) / rate
        logger.info("resampling %d samples to %d at %.1f Hz", len(times), count, rate)
        values = np.stack([np.interp(grid, times, column) for column in values.T], axis=1)
        times = grid
    if smoothing is not None:
        if smoothing % 2 == 0 or smoothing < 5:
            raise InvalidConfig("the smoothing window must be odd and at least 5")
        values = savgol_filter(values, smoothing, 3, axis=0)
    positions = values.reshape(len(times), n, 3)
    return MocapDataset(
        times=times,
        positions=positions,
        velocities=np.gradient(positions, times, axis=0),
        rate=float(rate),
        boundary=tuple(boundary) if boundary is not None else (1, n),
        filled=filled,
        l0=declared,
    )


def _excitation(rng, duration: float, samples: np.ndarray, amplitude: float, components: int):
    r"""Smooth random 3-D signal that starts and ends at rest"""
    signal = np.zeros((samples.shape[0], 3))
    for axis in range(3):
        for _ in range(components):
            frequency = rng.uniform(0.05, 0.6)
            phase = rng.uniform(0.0, 2 * np.pi)
            weight = rng.uniform(0.3, 1.0) * amplitude / components
            signal[:, axis] += weight * (np.sin(2 * np.pi * frequency * samples + phase) - np.sin(phase))
    ramp = np.clip(np.minimum(samples, duration - samples) / 5.0, 0.0, 1.0)
    envelope = ramp * ramp * (3.0 - 2.0 * ramp)
    return signal * envelope[:, None]


def synthetic_dataset(
    cable: CableParams,
    duration: float = 120.0,
    rate: float = 100.0,
    amplitude: float = 0.15,
    components: int = 3,
    noise_std: float = 0.0,
    seed: int = 0,
    substeps: int = ROLLOUT_SUBSTEPS,
) -> MocapDataset:
    r"""Boundary-driven simulation of a cable held at both ends.

    The cable starts at rest in its static shape with the ends at 80 % of the
    unstretched length apart; both ends then follow independent smooth random
    motions. The dataset declares the rest lengths of ``cable``.

    Args:
        cable: Cable parameters without a ground segment
        duration: Recorded time in s
        rate: Recording rate in Hz
        amplitude: Peak excursion scale of each end in m
        components: Sinusoids per axis of each end motion
        noise_std: Standard deviation of Gaussian marker noise in m
        seed: Seed of the excitation and of the noise
        substeps: Integration steps per recorded sample

    Returns:
        The recorded dataset
    """
    if cable.has_ground_segment:
        raise InvalidConfig("synthetic identification data needs a cable without anchor")
    rng = np.random.default_rng(seed)
    n = cable.n
    topology = Topology.build("C", n, (1, n))
    count = int(round(duration * rate)) + 1
    times = np.arange(count) / rate
    span = 0.8 * float(np.sum(cable.l0))
    first = np.array([0.0, 0.0, 1.5])
    last = first + np.array([span, 0.0, 0.0])
    start = static_equilibrium(topology, cable, {1: first, n: last})
    boundary = np.empty((count, 2, 3))
    boundary[:, 0] = first + _excitation(rng, duration, times, amplitude, components)
    boundary[:, 1] = last + _excitation(rng, duration, times, amplitude, components)
    positions, _ = rollout_batch(
        start[None],
        np.zeros((1, n, 3)),
        boundary[None],
        1.0 / rate,
        topology,
        cable,
        [0, n - 1],
        substeps,
    )
    positions = positions[0]
    if noise_std > 0:
        positions = positions + rng.normal(0.0, noise_std, positions.shape)
    logger.info("synthesised %.1f s of boundary-driven motion for %d points", duration, n)
    return MocapDataset(
        times=times,
        positions=positions,
        velocities=np.gradient(positions, times, axis=0),
        rate=rate,
        boundary=(1, n),
        l0=cable.l0,
    )
