import numpy as np
import pytest
from cableflat.errors import SeparationTooSmall
from cableflat.graph.topology import Topology
from cableflat.model.cable import (
    MassState,
    ground_anchor_force,
    mass_acceleration,
    mechanical_energy,
    segment_forces,
    spring_force,
    static_equilibrium,
)
from cableflat.model.params import CableParams
from hypothesis import assume, given
from hypothesis import strategies as st

coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
point = st.tuples(coordinate, coordinate, coordinate).map(np.array)


def test_spring_force_stretched_vertical() -> None:
    f = spring_force([0.0, 0.0, 0.3], [0.0, 0.0, 0.0], 11.312, 0.1950)
    assert f == pytest.approx([0.0, 0.0, -1.18776], abs=1e-10)


def test_spring_force_points_towards_stretched_neighbour() -> None:
    f = spring_force([0.0, 0.0, 0.0], [0.4, 0.0, 0.0], 5.411, 0.1942)
    assert f == pytest.approx([5.411 * (0.4 - 0.1942), 0.0, 0.0], abs=1e-12)
    assert f[0] > 0


def test_spring_force_at_rest_length() -> None:
    direction = np.array([1.0, -2.0, 0.5]) / np.linalg.norm([1.0, -2.0, 0.5])
    f = spring_force(np.zeros(3), 0.25 * direction, 10.0, 0.25)
    assert f == pytest.approx(np.zeros(3), abs=1e-12)


def test_spring_force_batched() -> None:
    p_i = np.zeros((4, 2, 3))
    p_next = np.zeros((4, 2, 3))
    p_next[..., 2] = 1.0
    f = spring_force(p_i, p_next, 2.0, 0.5)
    assert f.shape == (4, 2, 3)
    assert np.allclose(f[..., 2], 1.0)


def test_spring_force_rejects_coincident_points() -> None:
    with pytest.raises(SeparationTooSmall):
        spring_force(np.ones(3), np.ones(3), 1.0, 0.1)


@given(point, point)
def test_spring_force_antisymmetric(a: np.ndarray, b: np.ndarray) -> None:
    assume(np.linalg.norm(a - b) > 1e-3)
    assert np.allclose(spring_force(a, b, 7.0, 0.3), -spring_force(b, a, 7.0, 0.3))


@given(point, point)
def test_spring_force_is_negative_potential_gradient(a: np.ndarray, b: np.ndarray) -> None:
    assume(np.linalg.norm(a - b) > 0.05)
    k, l0, h = 5.411, 0.1942, 1e-6

    def potential(p: np.ndarray) -> float:
        return 0.5 * k * (np.linalg.norm(p - b) - l0) ** 2

    gradient = np.array(
        [
            (potential(a + h * e) - potential(a - h * e)) / (2 * h)
            for e in np.eye(3)
        ]
    )
    assert np.allclose(spring_force(a, b, k, l0), -gradient, atol=1e-5)


def test_ground_anchor_force() -> None:
    assert ground_anchor_force([0.0, 0.0, 0.25], 10.0, 0.2) == pytest.approx([0, 0, 0.5])
    assert ground_anchor_force([0.0, 0.0, 0.15], 10.0, 0.2) == pytest.approx([0, 0, -0.5])
    assert ground_anchor_force([0.0, 0.12, 0.16], 10.0, 0.2) == pytest.approx(
        np.zeros(3), abs=1e-12
    )


def test_mass_acceleration_free_fall(table1: CableParams) -> None:
    state = MassState(p=np.zeros(3), v=np.zeros(3))
    a = mass_acceleration(2, state, np.zeros(3), np.zeros(3), table1)
    assert a == pytest.approx([0.0, 0.0, -9.81])


def test_mass_acceleration_viscous_drag(table1: CableParams) -> None:
    state = MassState(p=np.zeros(3), v=[1.0, 0.0, 0.0])
    a = mass_acceleration(2, state, np.zeros(3), np.zeros(3), table1)
    assert a == pytest.approx([-1.72414, 0.0, -9.81], abs=1e-5)


def test_mass_acceleration_rejects_unknown_index(table1: CableParams) -> None:
    state = MassState(p=np.zeros(3), v=np.zeros(3))
    with pytest.raises(IndexError):
        mass_acceleration(7, state, np.zeros(3), np.zeros(3), table1)


def test_segment_forces_layout(hanging: Topology, hanging_params: CableParams) -> None:
    positions = np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.75], [0.0, 0.0, 1.0]])
    forces = segment_forces(positions, hanging, hanging_params)
    assert forces.shape == (4, 3)
    assert np.all(forces[0] == 0.0)
    assert np.all(forces[3] == 0.0)
    assert forces[1] == pytest.approx([0.0, 0.0, 5.411 * (0.25 - 0.1942)])
    batched = segment_forces(np.stack([positions] * 5), hanging, hanging_params)
    assert batched.shape == (5, 4, 3)


def test_anchored_segment_forces() -> None:
    topology = Topology.build("A", 2, [2])
    params = CableParams(n=2, k=[10.0, 20.0], l0=[0.2, 0.3], mass=[0.1, 0.1], c=[0.0, 0.0])
    forces = segment_forces(np.array([[0.0, 0.0, 0.25], [0.0, 0.0, 0.6]]), topology, params)
    assert forces[0] == pytest.approx([0.0, 0.0, 0.5])
    assert forces[1] == pytest.approx([0.0, 0.0, 20.0 * 0.05])


def test_mechanical_energy_of_a_resting_stretched_segment() -> None:
    topology = Topology.build("C", 2, [1, 2])
    params = CableParams(n=2, k=[10.0], l0=[0.2], mass=[0.1, 0.3], c=[0.0, 0.0], g=0.0)
    energy = mechanical_energy(
        np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]), np.zeros((2, 3)), topology, params
    )
    assert energy == pytest.approx(0.5 * 10.0 * 0.3 ** 2)


def test_hanging_chain_equilibrium(hanging: Topology, hanging_params: CableParams) -> None:
    top = np.array([0.0, 0.0, 1.0])
    positions = static_equilibrium(hanging, hanging_params, {3: top})
    g, m = hanging_params.g, 1.16e-3
    upper = np.linalg.norm(positions[2] - positions[1]) - 0.1950
    lower = np.linalg.norm(positions[1] - positions[0]) - 0.1942
    assert upper == pytest.approx(g * 2 * m / 11.312, rel=1e-6)
    assert upper == pytest.approx(2.0121e-3, rel=1e-3)
    assert lower == pytest.approx(g * m / 5.411, rel=1e-6)
    assert positions[2] == pytest.approx(top)
    assert np.allclose(positions[:, :2], 0.0, atol=1e-12)
    forces = segment_forces(positions, hanging, hanging_params)
    net = hanging_params.mass[:2, None] * (-g) * np.array([0, 0, 1]) + forces[1:3] - forces[:2]
    assert np.max(np.abs(net)) < 1e-9


def test_weightless_cable_rests_straight() -> None:
    topology = Topology.build("C", 4, [1, 4])
    params = CableParams(n=4, k=[3.0, 5.0, 7.0], l0=[0.2, 0.3, 0.4], mass=0.01 * np.ones(4),
                         c=np.zeros(4), g=0.0)
    positions = static_equilibrium(
        topology, params, {1: np.zeros(3), 4: np.array([0.9, 0.0, 0.0])}
    )
    assert positions[:, 0] == pytest.approx([0.0, 0.2, 0.5, 0.9], abs=1e-9)
    assert np.allclose(positions[:, 1:], 0.0, atol=1e-12)


def test_anchored_vertical_chain_stretches_under_gravity() -> None:
    topology = Topology.build("A", 3, [3])
    params = CableParams(n=3, k=[20.0, 20.0, 20.0], l0=[0.3, 0.3, 0.3], mass=np.full(3, 0.01),
                         c=np.zeros(3))
    top = np.array([0.0, 0.0, 1.0])
    positions = static_equilibrium(topology, params, {3: top})
    heights = np.concatenate([[0.0], positions[:, 2]])
    lengths = np.diff(heights)
    tensions = params.k * (lengths - params.l0)
    weights = params.g * params.mass
    assert np.all(tensions > 0)
    assert tensions[1] - tensions[0] == pytest.approx(weights[0], abs=1e-8)
    assert tensions[2] - tensions[1] == pytest.approx(weights[1], abs=1e-8)
    assert heights[-1] == pytest.approx(1.0)


def test_equilibrium_needs_every_robot_position(hanging: Topology, hanging_params) -> None:
    with pytest.raises(ValueError):
        static_equilibrium(hanging, hanging_params, {})
