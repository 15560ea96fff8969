import numpy as np
import pytest
from cableflat.control.feedback import (
    ClosedLoopController,
    GainConfig,
    IntegralState,
    deviation_bound,
    integral_update,
    replan_step,
)
from cableflat.errors import InvalidConfig, SchemaError
from cableflat.flatness.planner import FlatOutputs, plan
from cableflat.parse.scenario import ScenarioFile, ScenarioParser
from cableflat.simulation.simulator import SimConfig, simulate


def test_integral_accumulates() -> None:
    state = integral_update(IntegralState(), [1.0, -2.0, 0.5], 0.1)
    assert state.value == pytest.approx([0.1, -0.2, 0.05])
    assert not state.saturated
    state = integral_update(state, [1.0, -2.0, 0.5], 0.1)
    assert state.value == pytest.approx([0.2, -0.4, 0.1])


def test_integral_is_clamped_per_axis() -> None:
    state = integral_update(IntegralState(bound=0.15), [1.0, -2.0, 0.5], 0.1)
    assert state.value == pytest.approx([0.1, -0.15, 0.05])
    assert state.saturated


@pytest.mark.parametrize(
    "build",
    [
        lambda: integral_update(IntegralState(), [1.0, 0.0, 0.0], 0.0),
        lambda: IntegralState(bound=0.0),
        lambda: IntegralState(value=[1.0, 2.0]),
        lambda: GainConfig(K=(0.2, -0.1, 0.2)),
        lambda: GainConfig(rate=0.0),
        lambda: GainConfig(clamp=-1.0),
    ],
)
def test_invalid_feedback_settings(build) -> None:
    with pytest.raises(InvalidConfig):
        build()


def test_gain_config() -> None:
    gains = GainConfig(K=0.3, rate=50.0)
    assert gains.K == (0.3, 0.3, 0.3)
    assert gains.dt == pytest.approx(0.02)
    assert gains.matrix == pytest.approx(0.3 * np.eye(3))
    assert GainConfig.from_dict(gains.to_dict()) == gains
    with pytest.raises(SchemaError):
        GainConfig.from_dict({"Ki": [0.1, 0.1, 0.1]})


def test_deviation_bound() -> None:
    gains = GainConfig(K=(0.1, 0.2, 0.3), clamp=2.0)
    assert deviation_bound(gains) == pytest.approx(0.3 * 2.0 * np.sqrt(3.0))


def test_on_plan_measurements_leave_the_references(c1: ScenarioFile, on_plan: np.ndarray) -> None:
    controller = c1.closed_loop_controller()
    assert controller.rate == 100.0
    offsets = controller.update(0.0, on_plan)
    assert offsets.shape == (2, 3)
    assert offsets == pytest.approx(np.zeros((2, 3)), abs=1e-12)
    assert controller.open_loop(0.0) == pytest.approx(on_plan[[0, 5]])


def test_output_error_shifts_the_robot_on_its_side(c1: ScenarioFile, on_plan: np.ndarray) -> None:
    gains = GainConfig(K=(0.5, 0.5, 0.5), rate=100.0)
    controller = ClosedLoopController(c1.flat, c1.topology, c1.cable, c1.quads, gains)
    measured = on_plan.copy()
    measured[2] += [0.1, 0.0, 0.0]
    offsets = controller.update(0.0, measured)
    assert controller.states[3].value == pytest.approx([-0.001, 0.0, 0.0])
    assert controller.states[4].value == pytest.approx(np.zeros(3), abs=1e-12)
    assert offsets[0] == pytest.approx([-0.0005, 0.0, 0.0], abs=1e-10)
    assert offsets[1] == pytest.approx(np.zeros(3), abs=1e-10)


def test_offsets_follow_the_integral_states(c1: ScenarioFile, on_plan: np.ndarray) -> None:
    gains = GainConfig(K=(0.2, 0.4, 0.6), rate=10.0, clamp=0.05)
    controller = ClosedLoopController(c1.flat, c1.topology, c1.cable, c1.quads, gains)
    measured = on_plan + [0.0, 0.3, -0.1]
    for tick in range(5):
        offsets = controller.update(0.0, measured)
        K = gains.matrix
        assert offsets[0] == pytest.approx(K @ controller.states[3].value, abs=1e-10)
        assert offsets[1] == pytest.approx(K @ controller.states[4].value, abs=1e-10)
    assert controller.states[3].saturated
    assert np.max(np.linalg.norm(offsets, axis=-1)) <= deviation_bound(gains) + 1e-12
    controller.reset()
    assert controller.states[3].value == pytest.approx(np.zeros(3))


def test_zero_gains_are_open_loop(c1: ScenarioFile, on_plan: np.ndarray) -> None:
    gains = GainConfig(K=(0.0, 0.0, 0.0))
    controller = ClosedLoopController(c1.flat, c1.topology, c1.cable, c1.quads, gains)
    offsets = controller.update(0.0, on_plan + 0.2)
    assert offsets == pytest.approx(np.zeros((2, 3)), abs=1e-12)


def test_replan_step_returns_the_corrected_robots(c1: ScenarioFile, on_plan: np.ndarray) -> None:
    controller = c1.closed_loop_controller()
    robots, states = replan_step(
        c1.flat, 0.0, on_plan - 0.1, controller.states, c1.controller, c1.topology, c1.cable, c1.quads
    )
    assert set(states) == {3, 4}
    assert states[3].value == pytest.approx(np.full(3, 0.001))
    assert robots[1] == pytest.approx(on_plan[5] + 0.2 * 0.001)
    assert controller.states[3].value == pytest.approx(np.zeros(3))


def test_feedback_needs_a_class_c_plan(c1: ScenarioFile) -> None:
    a1 = ScenarioParser().parse("scenarios/a1_circle")
    with pytest.raises(InvalidConfig):
        ClosedLoopController(a1.flat, a1.topology, a1.cable, a1.quads)
    unpaired = FlatOutputs(c1.flat.channels)
    with pytest.raises(InvalidConfig):
        ClosedLoopController(unpaired, c1.topology, c1.cable, c1.quads)


def test_closed_loop_simulation_keeps_the_shift_bounded(c1: ScenarioFile) -> None:
    times = np.linspace(0.0, 0.5, 51)
    trajectory = plan(c1.flat, c1.topology, c1.cable, c1.quads, times)
    controller = c1.closed_loop_controller()
    config = SimConfig(dt=0.002, duration=0.5, mode="closed_loop")
    log = simulate(
        config, c1.topology, c1.plant, c1.quads, plan=trajectory, controller=controller
    )
    assert log.outputs == (3, 4)
    assert np.all(np.isfinite(log.reference_offsets))
    shift = np.linalg.norm(log.reference_offsets, axis=-1)
    assert np.max(shift) <= deviation_bound(c1.controller) + 1e-12
    assert np.max(shift) > 0.0
