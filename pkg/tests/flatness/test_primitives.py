import numpy as np
import pytest
from cableflat.errors import InvalidConfig
from cableflat.flatness.primitives import (
    PRIMITIVES,
    Constant,
    GaussianExp,
    MinimumJerk,
    Polynomial,
    Sinusoid,
    Sum,
)


def test_constant_has_no_motion() -> None:
    jet = Constant([0.1, 0.2, 0.3]).jet(np.linspace(0.0, 1.0, 4), 3)
    assert jet.value == pytest.approx(np.tile([0.1, 0.2, 0.3], (4, 1)))
    assert np.all(jet.coefficients[1:] == 0.0)


def test_polynomial_derivatives() -> None:
    poly = Polynomial([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]], t0=1.0)
    jet = poly.jet([3.0], 3)
    assert jet.value[0] == pytest.approx([1.0, 4.0, 12.0])
    assert jet.derivative(1)[0] == pytest.approx([0.0, 2.0, 12.0])
    assert jet.derivative(2)[0] == pytest.approx([0.0, 0.0, 6.0])
    assert jet.derivative(3)[0] == pytest.approx([0.0, 0.0, 0.0])


def test_minimum_jerk_is_rest_to_rest() -> None:
    start, end = np.array([0.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.5])
    primitive = MinimumJerk(start, end, duration=4.0, t0=1.0)
    jet = primitive.jet(np.array([0.0, 1.0, 3.0, 5.0, 6.0]), 3)
    assert jet.value[0] == pytest.approx(start)
    assert jet.value[1] == pytest.approx(start)
    assert jet.value[2] == pytest.approx(0.5 * (start + end))
    assert jet.value[3] == pytest.approx(end)
    assert jet.value[4] == pytest.approx(end)
    for k in (1, 2):
        assert jet.derivative(k)[[0, 1, 3, 4]] == pytest.approx(np.zeros((4, 3)), abs=1e-12)
    assert jet.derivative(1)[2] == pytest.approx(1.875 * (end - start) / 4.0)


def test_minimum_jerk_matches_finite_differences() -> None:
    primitive = MinimumJerk([0.0], [2.0], duration=3.0)
    t, h = 1.1, 1e-6
    slope = (primitive([t + h]) - primitive([t - h])) / (2 * h)
    assert primitive.jet([t], 1).derivative(1)[0] == pytest.approx(slope[0], rel=1e-7)


def test_gaussian_exp_goes_out_and_back() -> None:
    primitive = GaussianExp(offset=[-0.1, 0.0, 1.0], amplitude=[1.5, 0.0, 0.0], t0=5.0, width=1.0)
    jet = primitive.jet(np.array([0.0, 5.0, 10.0]), 2)
    assert jet.value[1] == pytest.approx([-1.6, 0.0, 1.0])
    assert jet.derivative(1)[1] == pytest.approx(np.zeros(3))
    assert jet.derivative(2)[1, 0] == pytest.approx(2 * 1.5)
    assert jet.value[0] == pytest.approx([-0.1, 0.0, 1.0], abs=1e-9)
    assert jet.value[2] == pytest.approx([-0.1, 0.0, 1.0], abs=1e-9)


def test_sum_adds_terms() -> None:
    times = np.linspace(0.0, 2.0, 5)
    a = Sinusoid([0.0, 0.75, 0.01], 0.125, offset=[0.1, 0.0, 1.0])
    b = Polynomial([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    total = a + b
    assert isinstance(total, Sum)
    assert total.jet(times, 2).coefficients == pytest.approx(
        (a.jet(times, 2) + b.jet(times, 2)).coefficients
    )


@pytest.mark.parametrize(
    "primitive",
    [
        Constant(0.3),
        Polynomial([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]], t0=0.5),
        MinimumJerk([0.0, 0.0, 1.0], [0.5, 0.0, 1.0], 10.0),
        Sinusoid([0.46, 0.46, 0.0], 0.5, phase=[1.5, 0.0, 0.0], offset=[0.0, 0.0, 1.0]),
        GaussianExp([0.0, 0.0, 1.0], [1.5, 0.0, 0.0], 5.0, 2.0),
    ],
)
def test_primitives_rebuild_from_their_parameters(primitive) -> None:
    data = primitive.to_dict()
    rebuilt = PRIMITIVES[data.pop("primitive")](**data)
    times = np.linspace(0.0, 10.0, 7)
    assert rebuilt(times) == pytest.approx(primitive(times))


@pytest.mark.parametrize(
    "build",
    [
        lambda: MinimumJerk([0.0], [1.0], duration=0.0),
        lambda: MinimumJerk([0.0, 1.0], [1.0], duration=1.0),
        lambda: GaussianExp([0.0], [1.0], t0=0.0, width=0.0),
        lambda: Polynomial([]),
        lambda: Sum([]),
        lambda: Sum([Constant(0.0), Constant([0.0, 0.0, 0.0])]),
    ],
)
def test_invalid_primitives(build) -> None:
    with pytest.raises(InvalidConfig):
        build()
