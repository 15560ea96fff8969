from math import factorial

import numpy as np
import pytest
from cableflat.errors import InsufficientDepth, ZeroNorm
from cableflat.flatness.jet import Jet
from cableflat.flatness.primitives import Polynomial, Sinusoid, time_jet
from hypothesis import given
from hypothesis import strategies as st


def test_from_derivatives_and_back() -> None:
    x = np.array([1.0, 2.0])
    jet = Jet.from_derivatives([x, 3 * x, 4 * x, 6 * x])
    assert jet.depth == 3
    assert jet.dim == 1
    assert jet.derivative(2)[:, 0] == pytest.approx(4 * x)
    assert jet.derivatives()[3, :, 0] == pytest.approx(6 * x)


def test_unit_of_constant_vector() -> None:
    unit = Jet.constant([3.0, 0.0, 0.0], 3, samples=4).unit()
    assert np.allclose(unit.value, [1.0, 0.0, 0.0])
    assert np.all(unit.coefficients[1:] == 0.0)


def test_norm_derivatives() -> None:
    p = Polynomial([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).jet([1.0], 2)
    norm = p.norm()
    assert norm.value[0, 0] == pytest.approx(np.sqrt(2.0))
    assert norm.derivative(1)[0, 0] == pytest.approx(1.0 / np.sqrt(2.0))
    assert norm.derivative(2)[0, 0] == pytest.approx(1.0 / (2.0 * np.sqrt(2.0)))


def test_norm_matches_finite_differences() -> None:
    signal = Sinusoid([0.3, 0.2, 0.1], 1.3, phase=[0.0, 1.0, 2.0], offset=[1.0, 0.0, 0.5])
    t, h = 0.7, 1e-4
    norm = signal.jet([t], 2).norm()

    def value(s: float) -> float:
        return float(np.linalg.norm(signal([s])[0]))

    central = (value(t + h) - 2 * value(t) + value(t - h)) / h ** 2
    assert norm.derivative(2)[0, 0] == pytest.approx(central, rel=1e-5)


def test_product_rule() -> None:
    t = 0.3
    square = Polynomial([0.0, 0.0, 1.0]).jet([t], 3)
    sine = Sinusoid(1.0, 1.0).jet([t], 3)
    product = square * sine
    first = 2 * t * np.sin(t) + t ** 2 * np.cos(t)
    second = 2 * np.sin(t) + 4 * t * np.cos(t) - t ** 2 * np.sin(t)
    assert product.derivative(1)[0, 0] == pytest.approx(first, rel=1e-10)
    assert product.derivative(2)[0, 0] == pytest.approx(second, rel=1e-10)


def test_sinusoid_derivatives() -> None:
    times = np.linspace(0.0, 2.0, 9)
    amplitude, omega, phase = 0.4, 2.5, 0.3
    jet = Sinusoid(amplitude, omega, phase=phase).jet(times, 6)
    for k in range(7):
        expected = amplitude * omega ** k * np.sin(omega * times + phase + k * np.pi / 2)
        assert jet.derivative(k)[:, 0] == pytest.approx(expected, abs=1e-9)


def test_reciprocal_derivatives() -> None:
    times = np.array([0.0, 0.5, 2.0])
    inverse = (time_jet(times, 5) + 1.0).reciprocal()
    for k in range(6):
        expected = (-1) ** k * factorial(k) / (1.0 + times) ** (k + 1)
        assert inverse.derivative(k)[:, 0] == pytest.approx(expected)


def test_exponential_derivatives() -> None:
    times = np.array([-1.0, 0.0, 0.4])
    jet = time_jet(times, 4).exp()
    for k in range(5):
        assert jet.derivative(k)[:, 0] == pytest.approx(np.exp(times))


def test_cross_product_rule() -> None:
    times = np.array([0.2, 1.1])
    a = Sinusoid([1.0, 0.5, 0.2], 0.7, offset=[0.0, 1.0, 0.0]).jet(times, 1)
    b = Polynomial([[1.0, 0.0, 2.0], [0.0, 1.0, -1.0]]).jet(times, 1)
    cross = a.cross(b)
    expected = np.cross(a.derivative(1), b.value) + np.cross(a.value, b.derivative(1))
    assert cross.value == pytest.approx(np.cross(a.value, b.value))
    assert cross.derivative(1) == pytest.approx(expected)


@given(st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=1, max_size=4))
def test_square_root_inverts_square(coefficients) -> None:
    times = np.array([0.0, 0.5, 1.0])
    x = Polynomial([4.0] + coefficients).jet(times, 4)
    positive = x * x + 1.0
    root = positive.sqrt()
    assert np.allclose((root * root).coefficients, positive.coefficients, atol=1e-8)


def test_differentiate_and_truncate() -> None:
    jet = Polynomial([1.0, 2.0, 3.0, 4.0]).jet([1.0], 3)
    velocity = jet.differentiate()
    assert velocity.depth == 2
    assert velocity.value[0, 0] == pytest.approx(2.0 + 6.0 + 12.0)
    assert velocity.derivative(1)[0, 0] == pytest.approx(6.0 + 24.0)
    assert jet.truncate(1).depth == 1


def test_depth_errors() -> None:
    jet = Jet.constant([1.0, 0.0, 0.0], 2)
    with pytest.raises(InsufficientDepth):
        jet.derivative(3)
    with pytest.raises(InsufficientDepth):
        jet.differentiate(3)
    with pytest.raises(InsufficientDepth):
        jet.truncate(4)


def test_mixed_depth_arithmetic_keeps_the_shallower() -> None:
    deep = Jet.constant([1.0], 5)
    shallow = Jet.constant([2.0], 2)
    assert (deep + shallow).depth == 2
    assert (deep * shallow).depth == 2


def test_zero_norm_errors() -> None:
    jet = Jet.constant(np.zeros(3), 2, samples=3)
    with pytest.raises(ZeroNorm):
        jet.unit()
    with pytest.raises(ZeroNorm) as error:
        Jet.constant(0.0, 2).reciprocal()
    assert error.value.sample == 0
