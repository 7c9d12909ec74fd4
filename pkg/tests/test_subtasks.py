import math
import random

import pytest

from heurobot.core import ActionIndexMap, RobotConfig
from heurobot.subtasks import (
    ArmStabilizer,
    MoveSteps,
    MoveTo,
    SubTaskError,
    get_selector,
)

from helpers import make_obs, robot_state


def obs_at(x):
    return make_obs(robot=robot_state(platform_x=x))


def platform_x(obs):
    return obs.robot.platform_x


# --------------------------------------------------------------- MoveSteps


def test_move_steps_emits_action_n_times_then_done():
    st = MoveSteps(fixed_action=(0.5, 0.0), num_steps=3)
    obs = obs_at(0.0)
    assert st.step(obs) == ((0.5, 0.0), False)
    assert st.step(obs) == ((0.5, 0.0), False)
    act, done = st.step(obs)
    assert act == (0.5, 0.0) and done
    assert st.done


def test_move_steps_single_step():
    st = MoveSteps(fixed_action=(0.1,), num_steps=1)
    act, done = st.step(obs_at(0.0))
    assert act == (0.1,) and done


def test_move_steps_overstepping_is_an_error():
    st = MoveSteps(fixed_action=(0.0,), num_steps=5)
    obs = obs_at(0.0)
    for _ in range(5):
        st.step(obs)
    with pytest.raises(SubTaskError):
        st.step(obs)


def test_move_steps_rejects_bad_count():
    with pytest.raises(ValueError):
        MoveSteps(fixed_action=(0.0,), num_steps=0)


def test_move_steps_emission_is_constant():
    rng = random.Random(21)
    obs = obs_at(0.0)
    for _ in range(100):
        dim = rng.randint(1, 22)
        a = tuple(rng.uniform(-1, 1) for _ in range(dim))
        n = rng.randint(1, 50)
        st = MoveSteps(fixed_action=a, num_steps=n)
        outputs = [st.step(obs)[0] for _ in range(n)]
        assert all(out == a for out in outputs)


# ------------------------------------------------------------------ MoveTo


def test_move_to_positive_distance_emits_plus_v():
    mt = MoveTo(active_index=0, target=1.0, selector=platform_x, action_dim=2, velocity=0.5, threshold=0.1)
    act, done = mt.step(obs_at(0.2))
    assert act == (0.5, 0.0) and not done


def test_move_to_within_threshold_emits_minus_v_and_finishes():
    mt = MoveTo(active_index=0, target=1.0, selector=platform_x, action_dim=2, velocity=0.5, threshold=0.1)
    act, done = mt.step(obs_at(1.05))
    assert act == (-0.5, 0.0) and done


def test_move_to_exactly_on_target():
    # d = 0 takes the else branch: one -v emission, then immediately done
    mt = MoveTo(active_index=0, target=1.0, selector=platform_x, action_dim=3, velocity=0.4, threshold=0.05)
    act, done = mt.step(obs_at(1.0))
    assert act == (-0.4, 0.0, 0.0) and done


def test_move_to_done_step_is_an_error():
    mt = MoveTo(active_index=0, target=0.0, selector=platform_x, action_dim=1, velocity=0.5, threshold=0.1)
    mt.step(obs_at(0.0))
    with pytest.raises(SubTaskError):
        mt.step(obs_at(0.0))


def test_move_to_validation():
    with pytest.raises(ValueError):
        MoveTo(active_index=5, target=0.0, selector=platform_x, action_dim=3)
    with pytest.raises(ValueError):
        MoveTo(active_index=0, target=0.0, selector=platform_x, action_dim=3, velocity=0.0)
    with pytest.raises(ValueError):
        MoveTo(active_index=0, target=0.0, selector=platform_x, action_dim=3, velocity=1.5)
    with pytest.raises(ValueError):
        MoveTo(active_index=0, target=0.0, selector=platform_x, action_dim=3, threshold=0.0)


def test_move_to_nonfinite_selector_output_is_an_error():
    mt = MoveTo(active_index=0, target=0.0, selector=lambda obs: float("nan"), action_dim=1)
    with pytest.raises(SubTaskError):
        mt.step(obs_at(0.0))


def _euler_loop_oracle(x0, xt, v, t, delta):
    """Independent brute-force transcription of the bang-bang loop."""
    x = x0
    steps = 0
    while True:
        d = xt - x
        a = v if d > 0 else -v
        steps += 1
        done = abs(d) < t
        x = x + a * delta
        if done:
            return steps


def _run_move_to(x0, xt, v, t, delta, max_steps=100000):
    mt = MoveTo(active_index=0, target=xt, selector=platform_x, action_dim=1, velocity=v, threshold=t)
    x = x0
    steps = 0
    while not mt.done:
        act, _ = mt.step(obs_at(x))
        assert act[0] in (v, -v)
        steps += 1
        x = x + act[0] * delta
        assert steps <= max_steps
    return steps


def test_move_to_random_walk_convergence_bound():
    # x0=0, xt=1, v=1, t=0.05, delta=0.02: bound is ceil(0.95/0.02)+1 = 49
    steps = _run_move_to(0.0, 1.0, 1.0, 0.05, 0.02)
    assert steps == _euler_loop_oracle(0.0, 1.0, 1.0, 0.05, 0.02)
    assert steps <= 49


def test_move_to_matches_oracle_and_bound_on_random_cases():
    rng = random.Random(2024)
    for _ in range(300):
        t = rng.uniform(0.005, 0.1)
        delta = rng.uniform(0.005, 0.05)
        v = rng.uniform(0.05, 1.0)
        while v * delta >= 2 * t:
            v = rng.uniform(0.05, 1.0)
        x0 = rng.uniform(-2, 2)
        xt = rng.uniform(-2, 2)
        steps = _run_move_to(x0, xt, v, t, delta)
        assert steps == _euler_loop_oracle(x0, xt, v, t, delta)
        bound = max(math.ceil((abs(xt - x0) - t) / (v * delta)), 0) + 1
        assert steps <= bound


def test_move_to_every_emission_is_one_hot():
    rng = random.Random(99)
    for _ in range(50):
        dim = rng.randint(2, 22)
        idx = rng.randint(0, dim - 1)
        v = rng.uniform(0.1, 1.0)
        mt = MoveTo(active_index=idx, target=rng.uniform(-1, 1), selector=platform_x,
                    action_dim=dim, velocity=v, threshold=0.05)
        x = rng.uniform(-1, 1)
        while not mt.done:
            act, _ = mt.step(obs_at(x))
            assert abs(act[idx]) == v
            assert all(val == 0.0 for i, val in enumerate(act) if i != idx)
            x = x + act[idx] * 0.02


# --------------------------------------------------------------- selectors


def test_selector_registry():
    obs = make_obs(robot=robot_state(platform_x=1.5, platform_yaw=0.3))
    assert get_selector("platform_x")(obs) == 1.5
    assert get_selector("platform_yaw")(obs) == 0.3
    with pytest.raises(ValueError):
        get_selector("warp_drive")


def test_finger_selectors_average_over_arms():
    robot = robot_state(
        arm_joints=((0.0,) * 8, (0.0,) * 8),
        finger_positions=((0.3, 0.2, 0.5), (0.5, -0.2, 0.7)),
    )
    obs = make_obs(robot=robot)
    assert get_selector("finger_x")(obs) == pytest.approx(0.4)
    assert get_selector("finger_y")(obs) == pytest.approx(0.0)
    assert get_selector("finger_height")(obs) == pytest.approx(0.6)


def test_arm_joint_selector_names():
    robot = robot_state(arm_joints=((0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),))
    obs = make_obs(robot=robot)
    assert get_selector("left_arm_joint_3")(obs) == 0.4
    with pytest.raises(SubTaskError):
        get_selector("right_arm_joint_0")(obs)


# -------------------------------------------------------------- stabilizer


def two_joint_map():
    return ActionIndexMap.for_robot(RobotConfig(arms=("left",), joints_per_arm=2))


def obs_for_joints(index_map, joints):
    n = index_map.robot.joints_per_arm
    arms = tuple(tuple(j) for j in joints)
    return make_obs(robot=robot_state(arm_joints=arms))


def test_stabilizer_init_builds_one_corrector_per_joint():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.1, -0.3),))
    assert len(stab.correctors) == 2
    assert [c.target for c in stab.correctors] == [0.1, -0.3]
    assert all(c.threshold == 0.01 for c in stab.correctors)


def test_stabilizer_rejects_empty_or_mismatched_reference():
    m = two_joint_map()
    with pytest.raises(ValueError):
        ArmStabilizer(m, ())
    with pytest.raises(ValueError):
        ArmStabilizer(m, ((),))
    with pytest.raises(ValueError):
        ArmStabilizer(m, ((0.1, 0.2, 0.3),))


def test_stabilizer_at_reference_fires_once_then_goes_quiet():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.1, -0.3),))
    obs = obs_for_joints(m, ((0.1, -0.3),))
    first = stab.step(obs)
    j0, j1 = m.arm_joint(0, 0), m.arm_joint(0, 1)
    assert abs(first[j0]) == stab.velocity and abs(first[j1]) == stab.velocity
    assert all(c.done for c in stab.correctors)
    second = stab.step(obs)
    assert all(v == 0.0 for v in second)


def test_stabilizer_corrects_displaced_joint_toward_reference():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.0, 0.0),))
    obs = obs_for_joints(m, ((0.5, 0.0),))
    out = stab.step(obs)
    assert out[m.arm_joint(0, 0)] == -stab.velocity  # pushes back down
    # zero outside the stabilized joint slots
    joint_slots = set(m.arm_joint_slots(0))
    assert all(v == 0.0 for i, v in enumerate(out) if i not in joint_slots)


def test_stabilizer_rearms_after_convergence():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.0, 0.0),))
    settled = obs_for_joints(m, ((0.0, 0.0),))
    stab.step(settled)
    assert all(v == 0.0 for v in stab.step(settled))
    disturbed = obs_for_joints(m, ((0.2, 0.0),))
    out = stab.step(disturbed)
    assert out[m.arm_joint(0, 0)] != 0.0


def test_stabilizer_gain_decays_geometrically_with_floor():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.0, 0.0),), velocity=0.2, decay=0.5, min_velocity=0.02)
    obs = obs_for_joints(m, ((1.0, 1.0),))
    gains = []
    for _ in range(8):
        out = stab.step(obs)
        gains.append(abs(out[m.arm_joint(0, 0)]))
    assert gains[:4] == [pytest.approx(0.2 * 0.5**k) for k in range(4)]
    assert gains[-1] == 0.02  # floored


def test_stabilizer_constant_gain_mode():
    m = two_joint_map()
    stab = ArmStabilizer(m, ((0.0, 0.0),), velocity=0.2, decay=1.0)
    obs = obs_for_joints(m, ((1.0, 1.0),))
    for _ in range(5):
        out = stab.step(obs)
        assert abs(out[m.arm_joint(0, 0)]) == 0.2


def test_stabilizer_dual_arm_reference():
    m = ActionIndexMap.for_robot(RobotConfig(arms=("left", "right"), joints_per_arm=2))
    stab = ArmStabilizer(m, ((0.0, 0.0), (0.1, 0.1)))
    assert len(stab.correctors) == 4
