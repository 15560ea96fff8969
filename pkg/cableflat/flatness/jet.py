r"""Truncated Taylor arithmetic.

A :class:`Jet` holds a signal and its first ``depth`` time derivatives at every
sample of a time grid. Internally the normalised Taylor coefficients
``d^k x / dt^k / k!`` are stored with shape ``(depth + 1, T, dim)``: scalars keep a
trailing axis of size one so that scalar-vector products broadcast.
"""
from math import factorial
from typing import Callable, Sequence, Union

import numpy as np

from cableflat.errors import InsufficientDepth, ZeroNorm, first_sample

__all__ = ["Jet", "EPS_NORM"]

EPS_NORM = 1e-6

Number = Union[float, int, np.ndarray]


def _factorials(depth: int) -> np.ndarray:
    return np.array([float(factorial(k)) for k in range(depth + 1)])


def _scale(coefficients: np.ndarray, factors: np.ndarray) -> np.ndarray:
    shape = (-1,) + (1,) * (coefficients.ndim - 1)
    return coefficients * factors.reshape(shape)


class Jet:
    __slots__ = ("coefficients",)

    def __init__(self, coefficients: np.ndarray) -> None:
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.ndim < 2:
            raise ValueError("jet coefficients need a depth axis and a value axis")
        self.coefficients = coefficients

    @classmethod
    def from_derivatives(cls, derivatives: Sequence[np.ndarray]) -> "Jet":
        r"""Build a jet from ``[x, x', x'', ...]``, each of shape (T, dim) or (T,)"""
        stacked = np.stack([np.asarray(d, dtype=float) for d in derivatives])
        if stacked.ndim == 2:
            stacked = stacked[..., None]
        return cls(_scale(stacked, 1.0 / _factorials(stacked.shape[0] - 1)))

    @classmethod
    def constant(cls, value: Number, depth: int, samples: int = 1) -> "Jet":
        r"""Jet of a signal that does not change in time"""
        value = np.asarray(value, dtype=float)
        if value.ndim == 0:
            value = value[None]
        if value.ndim == 1:
            value = np.broadcast_to(value, (samples, value.shape[0]))
        coefficients = np.zeros((depth + 1,) + value.shape)
        coefficients[0] = value
        return cls(coefficients)

    @classmethod
    def stack(cls, components: Sequence["Jet"]) -> "Jet":
        r"""Concatenate scalar jets into a vector jet"""
        depth = min(c.depth for c in components)
        return cls(np.concatenate([c.coefficients[: depth + 1] for c in components], axis=-1))

    @property
    def depth(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coefficients.shape[-1]

    @property
    def value(self) -> np.ndarray:
        return self.coefficients[0]

    def derivative(self, k: int) -> np.ndarray:
        if k > self.depth:
            raise InsufficientDepth(
                "derivative of order {} requested from a jet of depth {}".format(
                    k, self.depth
                )
            )
        return self.coefficients[k] * factorial(k)

    def derivatives(self) -> np.ndarray:
        return _scale(self.coefficients, _factorials(self.depth))

    def differentiate(self, order: int = 1) -> "Jet":
        r"""Jet of the ``order``-th derivative; it is ``order`` levels shallower"""
        if order > self.depth:
            raise InsufficientDepth(
                "cannot differentiate a jet of depth {} {} times".format(self.depth, order)
            )
        derivs = self.derivatives()[order:]
        return Jet(_scale(derivs, 1.0 / _factorials(derivs.shape[0] - 1)))

    def truncate(self, depth: int) -> "Jet":
        if depth > self.depth:
            raise InsufficientDepth(
                "cannot extend a jet of depth {} to {}".format(self.depth, depth)
            )
        return Jet(self.coefficients[: depth + 1])

    def component(self, i: int) -> "Jet":
        return Jet(self.coefficients[..., i:i + 1])

    def at(self, index) -> "Jet":
        r"""Restrict to a subset of the time samples"""
        return Jet(self.coefficients[:, index])

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        value = np.asarray(other, dtype=float)
        coefficients = np.zeros((self.depth + 1,) + np.broadcast(value, self.value).shape)
        coefficients[0] = value
        return Jet(coefficients)

    def _aligned(self, other):
        other = self._coerce(other)
        depth = min(self.depth, other.depth)
        return self.coefficients[: depth + 1], other.coefficients[: depth + 1]

    def __add__(self, other) -> "Jet":
        a, b = self._aligned(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._aligned(other)
        return Jet(a - b)

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) - self

    def __neg__(self) -> "Jet":
        return Jet(-self.coefficients)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.coefficients * np.asarray(other, dtype=float))
        return Jet(_convolve(*self._aligned(other), np.multiply))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.coefficients / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        a = self.coefficients
        zero = np.any(a[0] == 0.0, axis=-1)
        if np.any(zero):
            raise ZeroNorm("reciprocal of a jet with a zero value", sample=first_sample(zero))
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc = acc + a[j] * out[k - j]
            out[k] = -acc / a[0]
        return Jet(out)

    def dot(self, other: "Jet") -> "Jet":
        product = self * other
        return Jet(np.sum(product.coefficients, axis=-1, keepdims=True))

    def cross(self, other: "Jet") -> "Jet":
        return Jet(_convolve(*self._aligned(other), np.cross))

    def sqrt(self) -> "Jet":
        a = self.coefficients
        negative = np.any(a[0] <= 0.0, axis=-1)
        if np.any(negative):
            raise ZeroNorm(
                "square root of a non-positive jet value", sample=first_sample(negative)
            )
        out = np.zeros_like(a)
        out[0] = np.sqrt(a[0])
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for j in range(1, k):
                acc = acc + out[j] * out[k - j]
            out[k] = (a[k] - acc) / (2.0 * out[0])
        return Jet(out)

    def norm(self, eps: float = EPS_NORM) -> "Jet":
        squared = self.dot(self)
        small = squared.value[..., 0] < eps ** 2
        if np.any(small):
            raise ZeroNorm("norm below {:g}".format(eps), sample=first_sample(small))
        return squared.sqrt()

    def unit(self, eps: float = EPS_NORM) -> "Jet":
        return self * self.norm(eps).reciprocal()

    def compose(self, derivatives_at_value: Callable[[np.ndarray, int], np.ndarray]) -> "Jet":
        r"""Jet of ``f(self)`` for an elementwise scalar function ``f``.

        Args:
            derivatives_at_value: Called with the value channel and the depth,
                returns ``[f(x), f'(x), ..., f^(depth)(x)]`` stacked on axis 0
        """
        depth = self.depth
        f = np.asarray(derivatives_at_value(self.value, depth), dtype=float)
        shift = self.coefficients.copy()
        shift[0] = 0.0
        out = np.zeros_like(self.coefficients)
        out[0] = f[0]
        power = np.zeros_like(self.coefficients)
        power[0] = 1.0
        for m in range(1, depth + 1):
            power = _convolve(power, shift, np.multiply)
            out = out + power * (f[m] / factorial(m))
        return Jet(out)

    def sin(self) -> "Jet":
        return self.compose(_sin_derivatives)

    def cos(self) -> "Jet":
        return self.compose(lambda x, depth: _sin_derivatives(x + np.pi / 2, depth))

    def exp(self) -> "Jet":
        return self.compose(lambda x, depth: np.stack([np.exp(x)] * (depth + 1)))

    def __repr__(self) -> str:
        return "Jet(depth={}, samples={}, dim={})".format(
            self.depth, self.coefficients.shape[1:-1], self.dim
        )


def _sin_derivatives(x: np.ndarray, depth: int) -> np.ndarray:
    return np.stack([np.sin(x + k * np.pi / 2) for k in range(depth + 1)])


def _convolve(a: np.ndarray, b: np.ndarray, op) -> np.ndarray:
    depth = min(a.shape[0], b.shape[0])
    first = op(a[0], b[0])
    out = np.zeros((depth,) + first.shape)
    out[0] = first
    for k in range(1, depth):
        acc = op(a[0], b[k])
        for j in range(1, k + 1):
            acc = acc + op(a[j], b[k - j])
        out[k] = acc
    return out
