r"""Analytic flat-output signals with exact derivative jets.

Every primitive maps a time grid to a :class:`~cableflat.flatness.jet.Jet` of
its value and derivatives; no numerical differentiation is involved.
"""
from abc import ABC, abstractmethod
from typing import Dict, List, Sequence, Type

import numpy as np

from cableflat.errors import InvalidConfig
from cableflat.flatness.jet import Jet

__all__ = [
    "time_jet",
    "Primitive",
    "Constant",
    "Polynomial",
    "MinimumJerk",
    "Sinusoid",
    "GaussianExp",
    "Sum",
    "PRIMITIVES",
]


def time_jet(times, depth: int) -> Jet:
    r"""Jet of the identity signal ``t`` on the grid ``times``"""
    times = np.asarray(times, dtype=float)
    coefficients = np.zeros((depth + 1, times.shape[0], 1))
    coefficients[0, :, 0] = times
    if depth >= 1:
        coefficients[1] = 1.0
    return Jet(coefficients)


def _vector(values, name: str) -> np.ndarray:
    array = np.atleast_1d(np.asarray(values, dtype=float))
    if array.ndim != 1:
        raise InvalidConfig("'{}' must be a number or a flat list".format(name))
    return array


class Primitive(ABC):
    kind = ""

    @property
    @abstractmethod
    def dim(self) -> int:
        raise NotImplementedError

    @abstractmethod
    def jet(self, times, depth: int) -> Jet:
        raise NotImplementedError

    @abstractmethod
    def parameters(self) -> Dict:
        raise NotImplementedError

    def to_dict(self) -> Dict:
        return {"primitive": self.kind, **self.parameters()}

    def __call__(self, times) -> np.ndarray:
        return self.jet(times, 0).value

    def __add__(self, other: "Primitive") -> "Sum":
        return Sum([self, other])

    def __repr__(self) -> str:
        return "{}({})".format(type(self).__name__, self.parameters())


class Constant(Primitive):
    kind = "constant"

    def __init__(self, value) -> None:
        self.value = _vector(value, "value")

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def jet(self, times, depth: int) -> Jet:
        return Jet.constant(self.value, depth, samples=len(times))

    def parameters(self) -> Dict:
        return {"value": self.value.tolist()}


class Polynomial(Primitive):
    r"""Polynomial in ``t - t0``.

    Args:
        coefficients: Shape (degree + 1, dim), lowest power first
        t0: Time origin
    """

    kind = "polynomial"

    def __init__(self, coefficients, t0: float = 0.0) -> None:
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if coefficients.ndim != 2 or coefficients.shape[0] == 0:
            raise InvalidConfig("polynomial coefficients must be a non-empty table")
        self.coefficients = coefficients
        self.t0 = float(t0)

    @property
    def dim(self) -> int:
        return self.coefficients.shape[1]

    def jet(self, times, depth: int) -> Jet:
        s = time_jet(times, depth) - self.t0
        result = Jet.constant(self.coefficients[-1], depth, samples=len(times))
        for c in self.coefficients[-2::-1]:
            result = result * s + c
        return result

    def parameters(self) -> Dict:
        return {"coefficients": self.coefficients.tolist(), "t0": self.t0}


class MinimumJerk(Primitive):
    r"""Rest-to-rest quintic ``start + (end - start)(10s^3 - 15s^4 + 6s^5)``.

    The signal holds ``start`` before ``t0`` and ``end`` after ``t0 + duration``.
    """

    kind = "minimum_jerk"

    def __init__(self, start, end, duration: float, t0: float = 0.0) -> None:
        self.start = _vector(start, "start")
        self.end = _vector(end, "end")
        if self.start.shape != self.end.shape:
            raise InvalidConfig("'start' and 'end' must have the same size")
        if duration <= 0:
            raise InvalidConfig("'duration' must be positive")
        self.duration = float(duration)
        self.t0 = float(t0)

    @property
    def dim(self) -> int:
        return self.start.shape[0]

    def jet(self, times, depth: int) -> Jet:
        times = np.asarray(times, dtype=float)
        s = (time_jet(times, depth) - self.t0) / self.duration
        blend = s * s * s * (s * (s * 6.0 - 15.0) + 10.0)
        result = blend * (self.end - self.start) + self.start
        coefficients = result.coefficients.copy()
        before = times < self.t0
        after = times > self.t0 + self.duration
        coefficients[:, before | after] = 0.0
        coefficients[0, before] = self.start
        coefficients[0, after] = self.end
        return Jet(coefficients)

    def parameters(self) -> Dict:
        return {
            "start": self.start.tolist(),
            "end": self.end.tolist(),
            "duration": self.duration,
            "t0": self.t0,
        }


class Sinusoid(Primitive):
    r"""``offset + amplitude * sin(omega t + phase)``, component-wise"""

    kind = "sinusoid"

    def __init__(self, amplitude, omega: float, phase=0.0, offset=0.0) -> None:
        self.amplitude = _vector(amplitude, "amplitude")
        size = self.amplitude.shape[0]
        self.phase = np.broadcast_to(_vector(phase, "phase"), (size,)).copy()
        self.offset = np.broadcast_to(_vector(offset, "offset"), (size,)).copy()
        self.omega = float(omega)

    @property
    def dim(self) -> int:
        return self.amplitude.shape[0]

    def jet(self, times, depth: int) -> Jet:
        angle = time_jet(times, depth) * self.omega + self.phase
        return angle.sin() * self.amplitude + self.offset

    def parameters(self) -> Dict:
        return {
            "amplitude": self.amplitude.tolist(),
            "omega": self.omega,
            "phase": self.phase.tolist(),
            "offset": self.offset.tolist(),
        }


class GaussianExp(Primitive):
    r"""Out-and-back profile ``offset - amplitude * exp(-(t - t0)^2 / width)``.

    Args:
        offset: Rest value reached far from ``t0``
        amplitude: Excursion reached at ``t0``, per component
        t0: Time of the largest excursion
        width: Slope-tuning parameter in s^2 units of ``(t - t0)^2``
    """

    kind = "gaussian_exp"

    def __init__(self, offset, amplitude, t0: float, width: float) -> None:
        self.offset = _vector(offset, "offset")
        self.amplitude = np.broadcast_to(
            _vector(amplitude, "amplitude"), self.offset.shape
        ).copy()
        if width <= 0:
            raise InvalidConfig("'width' must be positive")
        self.t0 = float(t0)
        self.width = float(width)

    @property
    def dim(self) -> int:
        return self.offset.shape[0]

    def jet(self, times, depth: int) -> Jet:
        s = time_jet(times, depth) - self.t0
        bump = (s * s * (-1.0 / self.width)).exp()
        return bump * (-self.amplitude) + self.offset

    def parameters(self) -> Dict:
        return {
            "offset": self.offset.tolist(),
            "amplitude": self.amplitude.tolist(),
            "t0": self.t0,
            "width": self.width,
        }


class Sum(Primitive):
    kind = "sum"

    def __init__(self, terms: Sequence[Primitive]) -> None:
        terms = list(terms)
        if not terms:
            raise InvalidConfig("a sum needs at least one term")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise InvalidConfig("summed primitives must have the same size")
        self.terms: List[Primitive] = terms

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def jet(self, times, depth: int) -> Jet:
        result = self.terms[0].jet(times, depth)
        for term in self.terms[1:]:
            result = result + term.jet(times, depth)
        return result

    def parameters(self) -> Dict:
        return {"terms": [t.to_dict() for t in self.terms]}


PRIMITIVES: Dict[str, Type[Primitive]] = {
    cls.kind: cls
    for cls in (Constant, Polynomial, MinimumJerk, Sinusoid, GaussianExp, Sum)
}
