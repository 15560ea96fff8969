from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from cableflat.errors import (
    FlatOutputMismatch,
    InsufficientDepth,
    InvalidConfig,
    ResidualExceeded,
    ZeroForce,
)
from cableflat.flatness.planner import (
    EPS_RES,
    FlatOutputs,
    PlannedTrajectory,
    default_depth,
    plan,
    plan_class_b,
    plan_class_c,
    required_depth,
)
from cableflat.flatness.primitives import Constant
from cableflat.graph.topology import Topology
from cableflat.model.cable import static_equilibrium
from cableflat.model.params import CableParams, QuadParams
from cableflat.model.system import RobotFleet
from cableflat.parse.scenario import ScenarioFile


def planned(scenario: ScenarioFile, times: np.ndarray, **kwargs) -> PlannedTrajectory:
    return plan(
        scenario.flat, scenario.topology, scenario.cable, scenario.quads, times, **kwargs
    )


def worst_residual(scenario: ScenarioFile, trajectory: PlannedTrajectory) -> float:
    fleet = RobotFleet(scenario.topology, scenario.cable, scenario.quads)
    return trajectory.max_residual(scenario.cable, fleet)


def test_required_depths(a1: ScenarioFile, b: ScenarioFile, c1: ScenarioFile) -> None:
    assert required_depth(a1.topology) == 8
    assert required_depth(b.topology) == 8
    assert required_depth(c1.topology, (3, 4)) == 8
    assert required_depth(Topology.build("C", 7, [1, 4, 7]), (2, 3)) == 8
    assert default_depth(a1.topology) == 12
    assert default_depth(b.topology) == 16
    assert default_depth(c1.topology, (3, 4)) == 18
    with pytest.raises(InvalidConfig):
        required_depth(c1.topology)


@pytest.mark.parametrize("name", ["a1", "b", "c1"])
def test_plans_satisfy_the_dynamics(name: str, request, times: np.ndarray) -> None:
    scenario = request.getfixturevalue(name)
    trajectory = planned(scenario, times)
    n, n_robots = scenario.topology.n, scenario.topology.n_robots
    assert trajectory.positions.shape == (times.shape[0], n, 3)
    assert trajectory.forces.shape == (times.shape[0], n + 1, 3)
    assert trajectory.rotations.shape == (times.shape[0], n_robots, 3, 3)
    assert worst_residual(scenario, trajectory) < EPS_RES


def test_plan_reproduces_the_flat_outputs(c1: ScenarioFile, times: np.ndarray) -> None:
    trajectory = planned(c1, times)
    assert trajectory.positions[:, 2] == pytest.approx(c1.flat.positions(3, times))
    assert trajectory.positions[:, 3] == pytest.approx(c1.flat.positions(4, times))
    assert np.allclose(trajectory.yaws, 0.0)


def test_plan_at_the_minimum_depth(a1: ScenarioFile, times: np.ndarray) -> None:
    trajectory = planned(a1, times, depth=8)
    assert worst_residual(a1, trajectory) < EPS_RES
    with pytest.raises(InsufficientDepth):
        planned(a1, times, depth=7)


def test_static_plan_is_the_static_equilibrium(a1: ScenarioFile) -> None:
    robot = np.array([1.0, 0.0, 1.6])
    rest = static_equilibrium(a1.topology, a1.cable, {3: robot})
    flat = FlatOutputs({"p1": Constant(rest[0]), "yaw3": Constant(0.0)})
    trajectory = plan(flat, a1.topology, a1.cable, a1.quads, np.linspace(0.0, 1.0, 3))
    assert trajectory.positions[0] == pytest.approx(rest, abs=1e-8)
    assert np.allclose(trajectory.thrusts, trajectory.thrusts[0])
    assert np.allclose(trajectory.omegas, 0.0)
    assert np.allclose(trajectory.velocities, 0.0)


def test_symmetric_hover_shares_the_cable_weight() -> None:
    topology = Topology.build("C", 6, [1, 6])
    cable = CableParams.load("table1")
    quad = QuadParams.load("quad_generic")
    flat = FlatOutputs(
        {
            "p3": Constant([-0.15, 0.0, 1.0]),
            "p4": Constant([0.15, 0.0, 1.0]),
            "yaw1": Constant(0.0),
            "yaw6": Constant(0.0),
        },
        pair=(3, 4),
    )
    trajectory = plan_class_c(flat, topology, cable, quad, np.array([0.0, 1.0]))
    g, m = cable.g, 0.00116
    expected = (0.5 + m) * g + 2 * m * g
    assert trajectory.thrust_vectors[:, :, 2] == pytest.approx(np.full((2, 2), expected))


def test_compression_branch_differs(a1: ScenarioFile, times: np.ndarray) -> None:
    tension = planned(a1, times)
    compression = planned(a1, times, branch="compression")
    assert not np.allclose(tension.positions[:, 1], compression.positions[:, 1])
    assert np.allclose(tension.positions[:, 0], compression.positions[:, 0])


def test_vanishing_force_stops_the_recursion(zero_force: ScenarioFile) -> None:
    with pytest.raises(ZeroForce) as error:
        zero_force.plan()
    assert error.value.index == 1
    assert error.value.time == 0.0
    assert "(index 1, t=0.0000s)" in str(error.value)


@pytest.mark.parametrize(
    "channels, pair",
    [
        ({"p1": Constant([0.0, 0.0, 1.0])}, None),
        ({"p1": Constant([0.0, 0.0, 1.0]), "p2": Constant([0.0, 0.0, 1.2]), "yaw3": Constant(0.0)}, None),
        ({"p1": Constant(1.0), "yaw3": Constant(0.0)}, None),
        ({"p1": Constant([0.0, 0.0, 1.0]), "yaw3": Constant([0.0, 0.0, 0.0])}, None),
        ({"p1": Constant([0.0, 0.0, 1.0]), "yaw3": Constant(0.0)}, (1, 2)),
    ],
)
def test_flat_output_mismatch(a1: ScenarioFile, channels, pair) -> None:
    flat = FlatOutputs(channels, pair=pair)
    with pytest.raises(FlatOutputMismatch):
        plan(flat, a1.topology, a1.cable, a1.quads, np.array([0.0]))


def test_planner_checks_the_class(a1: ScenarioFile, times: np.ndarray) -> None:
    with pytest.raises(InvalidConfig):
        plan_class_b(a1.flat, a1.topology, a1.cable, a1.quads, times)


def test_residuals_are_recomputed_from_positions(b: ScenarioFile, times: np.ndarray) -> None:
    trajectory = planned(b, times)
    positions = trajectory.positions.copy()
    positions[:, 2, 0] += 1e-3
    tampered = replace(trajectory, positions=positions)
    assert worst_residual(b, tampered) > 1e-3


def test_planning_is_deterministic(b: ScenarioFile, times: np.ndarray) -> None:
    assert planned(b, times) == planned(b, times)


def test_plan_csv(c1: ScenarioFile, times: np.ndarray, tmp_path: Path) -> None:
    trajectory = planned(c1, times)
    path = tmp_path / "plan.csv"
    trajectory.to_csv(path)
    loaded = PlannedTrajectory.read_csv(path, c1.topology)
    assert loaded.positions == pytest.approx(trajectory.positions, abs=1e-9)
    assert loaded.rotations == pytest.approx(trajectory.rotations, abs=1e-9)
    assert loaded.thrusts == pytest.approx(trajectory.thrusts, rel=1e-9)
    assert worst_residual(c1, loaded) < 1e-4


def test_hanging_cable_under_a_single_robot() -> None:
    topology = Topology.build("B", 3, [3])
    cable = CableParams(
        n=3, k=[5.411, 11.312], l0=[0.1942, 0.1950], mass=0.00116, c=0.0
    )
    quad = QuadParams.load("quad_generic")
    bottom = np.array([0.0, 0.0, 0.3])
    flat = FlatOutputs({"p1": Constant(bottom), "yaw3": Constant(0.0)})
    trajectory = plan_class_b(flat, topology, cable, quad, np.array([0.0]))
    g, m = cable.g, 0.00116
    assert trajectory.positions[0, 1, 2] - bottom[2] == pytest.approx(0.1942 + m * g / 5.411)
    assert trajectory.positions[0, 2, 2] - trajectory.positions[0, 1, 2] == pytest.approx(
        0.1950 + 2.01195e-3, rel=1e-5
    )
    assert trajectory.thrust_vectors[0, 0] == pytest.approx([0.0, 0.0, (0.5 + 3 * m) * g])


def test_dynamics_violation_is_an_error(a1: ScenarioFile, times: np.ndarray, monkeypatch) -> None:
    monkeypatch.setattr(PlannedTrajectory, "max_residual", lambda self, cable, fleet: 1e-3)
    with pytest.raises(ResidualExceeded) as error:
        planned(a1, times)
    assert error.value.exit_code == 5
    assert error.value.time in times
    assert "violates the dynamics by 0.001" in str(error.value)
