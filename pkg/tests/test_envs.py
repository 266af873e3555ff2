import numpy as np
import pytest

from app.core.errors import MissingStageError, ScheduleIndexError
from app.services.envs import (
    ContactStageRecord,
    DoubleIntegrator,
    HopperTask,
    Pad,
    Pendulum,
    WallJumpTask,
    contact_reward_terms,
    create_env,
    damped_torque,
    env_ids,
    env_parameters,
    staged_contact_reward,
    total_contact_score,
    wall_jump_terms,
)
from app.services.rollout import rollout

PADS = (
    Pad(center=0.0, radius=0.1, window=(0.0, 1.0)),
    Pad(center=0.5, radius=0.1, window=(1.0, 2.0)),
    Pad(center=1.0, radius=0.1, window=(2.0, 3.0)),
)

# shorthand foot positions: on stage-1 pad, on stage-0 pad, on no pad
A, P, X = 0.5, 0.0, 2.0


# ============================================
# Staged contact reward
# ============================================

@pytest.mark.parametrize(
    "contacts,positions,stage,expected",
    [
        ([True, True], [A, A], 1, 0.2),
        ([True, False], [A, A], 1, 0.1),
        ([False, False], [A, A], 1, 0.0),
        ([True, True], [X, X], 1, -0.2),
        ([True, True], [P, P], 1, 0.0),
        ([True, True], [A, P], 1, 0.1),
        ([True, True], [A, X], 1, 0.0),
        ([True, True], [P, X], 1, -0.1),
        ([False, True], [P, X], 1, -0.1),
        ([True, False], [P, X], 1, 0.0),
        ([True, True], [P, P], 0, 0.2),
        ([True, True], [A, A], 0, -0.2),
        ([True, True], [A, A], 2, 0.0),
        ([True, True], [P, P], 2, -0.2),
        ([True, True], [1.0, 1.05], 2, 0.2),
        ([True, True], [0.6, 0.41], 1, 0.2),
        ([True, True], [0.62, 0.5], 1, 0.0),
        ([True] * 4, [A, A, P, X], 1, 0.1),
        ([True] * 4, [P, P, P, P], 1, 0.0),
    ],
)
def test_staged_contact_reward(contacts, positions, stage, expected):
    assert staged_contact_reward(contacts, positions, stage, PADS) == pytest.approx(expected, abs=1e-12)


def test_staged_contact_reward_custom_weights():
    reward = staged_contact_reward([True] * 3, [A, A, X], 1, PADS, w_correct=1.0, w_wrong=0.5)

    assert reward == pytest.approx(1.5)


def test_staged_contact_reward_rejects_unknown_stage():
    with pytest.raises(ScheduleIndexError):
        staged_contact_reward([True], [A], 3, PADS)


def test_contact_reward_terms_vectorize_the_scalar_rule():
    positions = np.array([P, A, X, 1.0, 0.45, A])
    contacts = np.array([True, True, True, True, True, False])
    stages = np.array([0, 1, 1, 2, 2, 1])

    terms = contact_reward_terms(contacts, positions, stages, PADS)

    expected = [staged_contact_reward([c], [p], int(s), PADS) for c, p, s in zip(contacts, positions, stages)]
    np.testing.assert_allclose(terms, expected, atol=1e-12)
    assert staged_contact_reward(contacts[:2], positions[:2], 1, PADS) == pytest.approx(
        float(contact_reward_terms(contacts[:2], positions[:2], 1, PADS).sum())
    )


def test_damped_torque():
    tau = np.array([1.0, -2.0, 0.0])
    omega = np.array([0.5, 3.0, -1.0])

    np.testing.assert_allclose(damped_torque(tau, omega), tau - 0.65 * omega, atol=1e-12)


def test_total_contact_score_sums_window_minima():
    records = [
        ContactStageRecord(stage=1, values=np.array([0.0, -0.1, 0.1])),
        ContactStageRecord(stage=0, values=np.array([0.2, 0.1])),
    ]

    assert total_contact_score(records) == pytest.approx(0.0)


def test_total_contact_score_missing_stage():
    records = [
        ContactStageRecord(stage=0, values=np.array([0.1])),
        ContactStageRecord(stage=2, values=np.array([0.1])),
    ]

    with pytest.raises(MissingStageError):
        total_contact_score(records)
    with pytest.raises(MissingStageError):
        total_contact_score(records[:1], stage_count=2)


def test_pad_validation():
    with pytest.raises(ValueError):
        Pad(center=0.0, radius=0.0, window=(0.0, 1.0))
    with pytest.raises(ValueError):
        Pad(center=0.0, radius=0.1, window=(1.0, 1.0))
    with pytest.raises(ValueError):
        HopperTask(pads=(PADS[1], PADS[0]))


# ============================================
# Double integrator
# ============================================

def test_double_integrator_zero_order_hold(double_integrator):
    state = double_integrator.step(np.array([0.0, 0.0]), np.array([2.0]), 0.5)

    assert state.tolist() == pytest.approx([0.25, 1.0])


def test_optimal_plan_is_a_minimum(double_integrator):
    x0 = np.array([1.0, 0.0])
    plan, cost = double_integrator.optimal_plan(x0, 11, 0.1)
    rng = np.random.default_rng(0)

    for _ in range(20):
        nudged = plan + 1e-2 * rng.normal(size=plan.shape)
        assert rollout(double_integrator, x0, nudged, 0.1).total_cost > cost


def test_double_integrator_success(double_integrator):
    assert double_integrator.success(np.array([[1.0, 0.0], [0.01, 0.0]]))
    assert not double_integrator.success(np.array([[1.0, 0.0], [0.5, 0.0]]))
    assert double_integrator.tracking_error(np.array([[0.0, 0.0], [-0.3, 0.0]])) == pytest.approx(0.3)


# ============================================
# Pendulum
# ============================================

def test_pendulum_conserves_energy_without_torque():
    pendulum = Pendulum()
    state = np.array([1.0, 0.0])
    start = float(pendulum.energy(state))

    for _ in range(1000):
        state = pendulum.step(state, np.zeros(1), 0.01)

    assert abs(float(pendulum.energy(state)) - start) / start < 5e-3


def test_pendulum_upright_success():
    pendulum = Pendulum()

    assert pendulum.success(np.array([[0.0, 0.0], [np.pi + 0.1, 0.0]]))
    assert pendulum.success(np.array([[0.0, 0.0], [-np.pi + 0.1, 0.0]]))
    assert not pendulum.success(np.array([[0.0, 0.0], [0.0, 0.0]]))


# ============================================
# Wall jump
# ============================================

def test_wall_jump_landscape_terms():
    terms = wall_jump_terms(np.array([[0.0], [3.0], [4.41]]))

    assert terms["landing"][0] == 0.0
    assert terms["penalty"][0] == 0.0
    # a medium jump hits the wall below its top
    assert terms["landing"][1] == 1.0
    assert terms["penalty"][1] > 0.0
    # the goal jump clears the wall and lands near the goal
    assert terms["penalty"][2] == 0.0
    assert terms["landing"][2] == pytest.approx(1.8, abs=0.01)
    assert terms["goal"][2] < 0.01


def _wall_state(x, y, x_prev=None, y_prev=None, vx=0.0, vy=0.0):
    x_prev = x if x_prev is None else x_prev
    y_prev = y if y_prev is None else y_prev
    return np.array([x, y, vx, vy, x_prev, y_prev])


def test_wall_jump_task_success_and_penetration():
    task = WallJumpTask()

    assert task.success(np.array([_wall_state(0.0, 0.0), _wall_state(1.8, 0.0, x_prev=1.79)]))
    assert not task.success(np.array([_wall_state(0.0, 0.0), _wall_state(0.98, 0.0)]))
    assert task.penetration(_wall_state(1.0, 0.2)) == pytest.approx(0.45)
    assert task.penetration(_wall_state(1.0, 0.7)) == 0.0
    assert task.penetration(_wall_state(0.5, 0.0)) == 0.0


def test_wall_band_is_checked_along_the_travelled_segment():
    task = WallJumpTask()

    # both endpoints outside the band, low hop straight through it
    assert task.penetration(_wall_state(1.055, 0.095, x_prev=0.949)) == pytest.approx(0.555)
    # enters the band at y = 0.8 and leaves it at y = 0.6
    assert task.penetration(_wall_state(1.1, 0.5, x_prev=0.9, y_prev=0.9)) == pytest.approx(0.05)
    assert task.penetration(_wall_state(1.2, 0.8, x_prev=0.8, y_prev=0.8)) == 0.0
    # backwards through the wall counts too
    assert task.penetration(_wall_state(0.9, 0.1, x_prev=1.1)) == pytest.approx(0.55)


def test_fast_low_hop_through_the_wall_is_penalized_and_fails():
    task = WallJumpTask()
    before = _wall_state(0.949, 0.095, vx=5.3)

    after = task.step(before, np.array([1.0, 0.0]), 0.02)

    assert after[0] > task.wall_x + task.wall_half_width
    assert after[4] == 0.949 and after[5] == 0.095
    assert task.penetration(after) > 0.5
    assert task.running_cost(after, np.zeros(2)) > task.penalty_weight * 0.5
    assert not task.success(np.array([before, after, _wall_state(task.goal_x, 0.0)]))


def test_wall_jump_task_randomized_goal():
    task = WallJumpTask()
    rng = np.random.default_rng(4)

    goals = [task.randomized(rng).goal_x for _ in range(50)]

    assert all(abs(goal - 1.8) <= 0.3 for goal in goals)
    assert len(set(goals)) == 50
    assert task.goal_x == 1.8


def test_wall_jump_task_jumps_from_ground():
    task = WallJumpTask()

    airborne = task.step(np.zeros(6), np.array([0.0, 1.0]), 0.02)
    grounded = task.step(np.zeros(6), np.array([0.0, 0.2]), 0.02)

    assert airborne[1] > 0.0
    assert airborne[3] == pytest.approx(4.0)
    assert grounded[1] == 0.0
    assert task.initial_state().shape == (task.state_dim,)


def test_clearing_the_wall_takes_a_near_full_jump():
    task = WallJumpTask()
    apex = lambda jump: (task.jump_impulse * jump / task.mass) ** 2 / (2 * task.gravity)

    assert apex(1.0) > task.wall_height
    assert apex(0.85) < task.wall_height


# ============================================
# Hopper
# ============================================

def test_hopper_rollout_is_finite_and_scored():
    hopper = HopperTask()
    states = [hopper.initial_state()]
    for _ in range(60):
        states.append(hopper.step(states[-1], np.zeros(2), 0.02))
    states = np.array(states)

    assert np.all(np.isfinite(states))
    assert states[-1, 8] == pytest.approx(1.2)
    assert isinstance(hopper.contact_score(states), float)


def test_hopper_randomized_pads_are_bounded_translations():
    hopper = HopperTask()

    pads = hopper.randomized(np.random.default_rng(0)).pads

    steps = np.diff([pad.center for pad in pads])
    assert pads[0].center == hopper.pads[0].center
    assert np.all(np.abs(steps) <= hopper.pad_translation)
    assert [pad.window for pad in pads] == [pad.window for pad in hopper.pads]


def test_hopper_contact_reward_matches_scalar_rule():
    hopper = HopperTask()
    # foot on the stage-0 pad, just below the ground, at t = 0
    state = hopper.initial_state()
    state[1] = hopper.rest_length - 0.01

    assert float(hopper.contact_reward(state)) == pytest.approx(
        staged_contact_reward([True], [hopper.pads[0].center], 0, hopper.pads)
    )


# ============================================
# Registry
# ============================================

def test_env_registry():
    assert env_ids() == ["double-integrator", "hopper", "pendulum", "wall-jump"]
    assert isinstance(create_env("double-integrator", max_accel=5.0), DoubleIntegrator)
    assert "body_mass" in env_parameters("hopper")


def test_env_registry_errors():
    with pytest.raises(ValueError):
        create_env("cartpole")
    with pytest.raises(TypeError):
        create_env("pendulum", wingspan=2.0)
