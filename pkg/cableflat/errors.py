from typing import Optional

import numpy as np

__all__ = [
    "CableFlatError",
    "InvalidConfig",
    "SchemaError",
    "SeparationTooSmall",
    "NoConvergence",
    "DegenerateThrust",
    "GimbalDegeneracy",
    "ZeroNorm",
    "ZeroForce",
    "InsufficientDepth",
    "FlatOutputMismatch",
    "NonFiniteDerivative",
    "InstabilityDetected",
    "InvalidLambda",
    "NoDescent",
    "ExcessiveGaps",
    "ResidualExceeded",
    "locate",
    "first_sample",
]

EXIT_SCHEMA = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4
EXIT_RESIDUAL = 5


class CableFlatError(Exception):
    r"""Base class of every error raised by cableflat.

    Args:
        message: Human readable description
        time: Trajectory time at which the problem occurred, if known
        index: Cable point index at which the problem occurred, if known
        sample: Position on the time grid of a vectorised computation, if known
    """

    exit_code = EXIT_DEGENERATE

    def __init__(
        self,
        message: str,
        time: Optional[float] = None,
        index: Optional[int] = None,
        sample: Optional[int] = None,
    ) -> None:
        self.reason = message
        self.time = time
        self.index = index
        self.sample = sample
        details = []
        if index is not None:
            details.append("index {}".format(index))
        if time is not None:
            details.append("t={:.4f}s".format(time))
        if details:
            message = "{} ({})".format(message, ", ".join(details))
        super().__init__(message)


class InvalidConfig(CableFlatError, ValueError):
    exit_code = EXIT_SCHEMA


class SchemaError(InvalidConfig):
    pass


class ExcessiveGaps(SchemaError):
    pass


class SeparationTooSmall(CableFlatError):
    pass


class ZeroNorm(CableFlatError):
    pass


class ZeroForce(CableFlatError):
    pass


class DegenerateThrust(CableFlatError):
    pass


class GimbalDegeneracy(CableFlatError):
    pass


class InsufficientDepth(CableFlatError):
    pass


class FlatOutputMismatch(CableFlatError):
    pass


class NoConvergence(CableFlatError):
    pass


class NonFiniteDerivative(CableFlatError):
    pass


class InstabilityDetected(CableFlatError):
    pass


class ResidualExceeded(CableFlatError):
    r"""A planned trajectory does not satisfy the equations of motion it was planned with"""

    exit_code = EXIT_RESIDUAL


class InvalidLambda(InvalidConfig):
    pass


class NoDescent(CableFlatError):
    def __init__(self, message: str, stage: Optional[int] = None) -> None:
        self.stage = stage
        if stage is not None:
            message = "{} (homotopy stage {})".format(message, stage)
        super().__init__(message)


def locate(error: CableFlatError, times=None, index: Optional[int] = None) -> CableFlatError:
    r"""Copy of ``error`` annotated with the time of its sample and a chain index"""
    time = error.time
    if time is None and times is not None and error.sample is not None:
        time = float(times[error.sample])
    if index is None:
        index = error.index
    located = type(error)(error.reason, time=time, index=index, sample=error.sample)
    return located


def first_sample(mask) -> Optional[int]:
    r"""Leading-axis position of the first true entry of a boolean mask"""
    mask = np.asarray(mask)
    if mask.ndim == 0 or not mask.any():
        return None
    return int(np.argwhere(mask)[0][0])
