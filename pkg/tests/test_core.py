import math
import random

import pytest

from heurobot.core import (
    DUAL_ARM,
    SINGLE_ARM,
    ActionIndexMap,
    ObjectAttributes,
    RobotConfig,
    add,
    clamp,
    new_action,
    one_hot,
    wrap_angle,
)


def test_new_action_is_all_zeros():
    assert new_action(3) == (0.0, 0.0, 0.0)
    assert new_action(13) == (0.0,) * 13


@pytest.mark.parametrize("dim", [0, -1])
def test_new_action_rejects_nonpositive_dim(dim):
    with pytest.raises(ValueError):
        new_action(dim)


def test_clamp_saturates_componentwise():
    assert clamp((1.5, -2.0, 0.3)) == (1.0, -1.0, 0.3)
    assert clamp((0.0, 0.0, 0.0)) == (0.0, 0.0, 0.0)


def test_clamp_is_idempotent():
    rng = random.Random(7)
    for _ in range(1000):
        a = tuple(rng.uniform(-3, 3) for _ in range(rng.randint(1, 22)))
        once = clamp(a)
        assert clamp(once) == once
        assert all(-1.0 <= v <= 1.0 for v in once)


def test_add_disjoint_supports():
    assert add((0.5, 0.0), (0.0, 0.3)) == (0.5, 0.3)


def test_add_zero_is_identity():
    rng = random.Random(11)
    for _ in range(100):
        dim = rng.randint(1, 22)
        a = tuple(rng.uniform(-1, 1) for _ in range(dim))
        assert add(a, new_action(dim)) == a


def test_add_does_not_clamp_but_clamp_after_add_does():
    summed = add((0.8, 0.1), (0.8, 0.0))
    assert summed == (1.6, 0.1)
    assert clamp(summed) == (1.0, 0.1)


def test_add_dimension_mismatch():
    with pytest.raises(ValueError):
        add((0.1,), (0.1, 0.2))


def test_sum_chain_then_single_clamp_is_in_range():
    rng = random.Random(3)
    for _ in range(200):
        dim = rng.randint(1, 8)
        total = new_action(dim)
        for _ in range(rng.randint(1, 6)):
            total = add(total, tuple(rng.uniform(-1, 1) for _ in range(dim)))
        assert all(-1.0 <= v <= 1.0 for v in clamp(total))


def test_one_hot():
    assert one_hot(4, 2, -0.5) == (0.0, 0.0, -0.5, 0.0)
    with pytest.raises(ValueError):
        one_hot(4, 4, 1.0)


def test_wrap_angle_range_and_identity():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    rng = random.Random(5)
    for _ in range(500):
        a = rng.uniform(-30, 30)
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)
        assert math.sin(w) == pytest.approx(math.sin(a), abs=1e-9)


def test_action_dims_for_robot_configs():
    assert SINGLE_ARM.action_dim == 13
    assert DUAL_ARM.action_dim == 22


def test_robot_config_validation():
    with pytest.raises(ValueError):
        RobotConfig(arms=())
    with pytest.raises(ValueError):
        RobotConfig(arms=("middle",))
    with pytest.raises(ValueError):
        RobotConfig(joints_per_arm=0)


@pytest.mark.parametrize("config", [SINGLE_ARM, DUAL_ARM])
def test_index_map_is_a_bijection(config):
    m = ActionIndexMap.for_robot(config)
    assert m.dim == config.action_dim
    assert sorted(m.index_of(name) for name in m.slots) == list(range(m.dim))
    for name in m.slots:
        assert m.name_of(m.index_of(name)) == name


def test_index_map_arm_slots():
    single = ActionIndexMap.for_robot(SINGLE_ARM)
    assert not any("right" in s for s in single.slots)
    dual = ActionIndexMap.for_robot(DUAL_ARM)
    assert dual.finger_slot(0) == 12
    assert dual.finger_slot(1) == 21
    assert dual.arm_joint(1, 0) == 13
    with pytest.raises(KeyError):
        single.index_of("right_fingers")


def test_index_map_build():
    m = ActionIndexMap.for_robot(SINGLE_ARM)
    act = m.build({"platform_x": -0.3, "left_fingers": 0.6})
    assert act[m.index_of("platform_x")] == -0.3
    assert act[m.index_of("left_fingers")] == 0.6
    assert sum(1 for v in act if v != 0.0) == 2
    with pytest.raises(KeyError):
        m.build({"nonsense": 1.0})


def test_object_attribute_invariants():
    with pytest.raises(ValueError):
        ObjectAttributes(kind="door", handle_position=(0, 0, 0), object_pose=(0, 0, 0), size_extents=(1, 1, 1))
    with pytest.raises(ValueError):
        ObjectAttributes(
            kind="bucket",
            handle_position=(0, 0, 0),
            object_pose=(0, 0, 0),
            size_extents=(1, 1, 1),
            articulation_value=0.1,
            target_point=(1, 1),
        )
    with pytest.raises(ValueError):
        ObjectAttributes(kind="bucket", handle_position=(0, 0, 0), object_pose=(0, 0, 0), size_extents=(1, 1, 1))
