"""Shared action/observation data model used by the controllers, the mock
environment and the episode runner.

Actions are plain tuples of normalized command scalars. The convention for
every slot is a unitless velocity in [-1, +1]; the environment scales it by
its configured rates. Actions stay unclamped while controllers compose them
and are clamped exactly once, at environment entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TASK_KINDS = (
    "open_cabinet_door",
    "open_cabinet_drawer",
    "move_bucket",
    "push_chair",
)

OBJECT_KINDS = ("door", "drawer", "bucket", "chair")

# task kind -> object kind placed in the scene
TASK_OBJECT = {
    "open_cabinet_door": "door",
    "open_cabinet_drawer": "drawer",
    "move_bucket": "bucket",
    "push_chair": "chair",
}

PLATFORM_SLOTS = ("platform_x", "platform_y", "platform_rotation", "platform_height")

Action = tuple[float, ...]
Point3 = tuple[float, float, float]
Point2 = tuple[float, float]


def new_action(dim: int) -> Action:
    """All-zero action of the given dimension."""
    if dim <= 0:
        raise ValueError(f"action dimension must be positive, got {dim}")
    return (0.0,) * dim


def clamp(action: Action) -> Action:
    """Saturate every component into [-1, +1]. Idempotent."""
    return tuple(-1.0 if v < -1.0 else (1.0 if v > 1.0 else v) for v in action)


def add(a: Action, b: Action) -> Action:
    """Component-wise sum, intentionally not clamped."""
    if len(a) != len(b):
        raise ValueError(f"action dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def one_hot(dim: int, index: int, value: float) -> Action:
    """Action with a single nonzero component."""
    if not 0 <= index < dim:
        raise ValueError(f"action index {index} out of range for dimension {dim}")
    out = [0.0] * dim
    out[index] = value
    return tuple(out)


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


@dataclass(frozen=True, slots=True)
class RobotConfig:
    """Degree-of-freedom layout of a mobile manipulator."""

    arms: tuple[str, ...] = ("left",)
    joints_per_arm: int = 8

    def __post_init__(self) -> None:
        if not self.arms or any(a not in ("left", "right") for a in self.arms):
            raise ValueError(f"invalid arm set {self.arms!r}")
        if self.joints_per_arm <= 0:
            raise ValueError("joints_per_arm must be positive")

    @property
    def action_dim(self) -> int:
        # 4 platform DOFs + per arm: joints + one finger open/close channel
        return 4 + len(self.arms) * (self.joints_per_arm + 1)


SINGLE_ARM = RobotConfig(arms=("left",))
DUAL_ARM = RobotConfig(arms=("left", "right"))

# task kind -> robot configuration (dual-arm tasks hold the object with two arms)
TASK_ROBOT = {
    "open_cabinet_door": SINGLE_ARM,
    "open_cabinet_drawer": SINGLE_ARM,
    "move_bucket": DUAL_ARM,
    "push_chair": DUAL_ARM,
}


@dataclass(frozen=True)
class ActionIndexMap:
    """Bijection between named command slots and action vector indices.

    Slot names: the four platform slots, then per arm ``<arm>_arm_joint_<j>``
    followed by ``<arm>_fingers`` (positive = close, negative = open).
    """

    robot: RobotConfig
    slots: tuple[str, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    @classmethod
    def for_robot(cls, robot: RobotConfig) -> "ActionIndexMap":
        names = list(PLATFORM_SLOTS)
        for arm in robot.arms:
            names.extend(f"{arm}_arm_joint_{j}" for j in range(robot.joints_per_arm))
            names.append(f"{arm}_fingers")
        m = cls(robot=robot, slots=tuple(names))
        m._index.update({name: i for i, name in enumerate(names)})
        return m

    @property
    def dim(self) -> int:
        return len(self.slots)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown action slot {name!r}") from None

    def name_of(self, index: int) -> str:
        return self.slots[index]

    def arm_joint(self, arm: int, joint: int) -> int:
        return self.index_of(f"{self.robot.arms[arm]}_arm_joint_{joint}")

    def arm_joint_slots(self, arm: int) -> tuple[int, ...]:
        return tuple(self.arm_joint(arm, j) for j in range(self.robot.joints_per_arm))

    def finger_slot(self, arm: int) -> int:
        return self.index_of(f"{self.robot.arms[arm]}_fingers")

    def build(self, assignments: dict[str, float]) -> Action:
        """Action with the named slots set and every other component zero."""
        out = [0.0] * self.dim
        for name, value in assignments.items():
            out[self.index_of(name)] = float(value)
        return tuple(out)


def index_map_for_task(task_kind: str) -> ActionIndexMap:
    if task_kind not in TASK_ROBOT:
        raise ValueError(f"unknown task kind {task_kind!r}")
    return ActionIndexMap.for_robot(TASK_ROBOT[task_kind])


@dataclass(frozen=True, slots=True)
class RobotState:
    """Kinematic robot snapshot. Yaw is kept normalized to (-pi, pi]."""

    platform_x: float  # m
    platform_y: float  # m
    platform_height: float  # m
    platform_yaw: float  # rad
    arm_joints: tuple[tuple[float, ...], ...]  # rad, one tuple per arm
    finger_positions: tuple[Point3, ...]  # m, one fingertip point per arm
    grasping: tuple[bool, ...]  # per arm: attachment currently active


@dataclass(frozen=True, slots=True)
class ObjectAttributes:
    """Estimated attributes of the manipulated object.

    ``articulation_value`` is the door opening angle (rad) or drawer
    extension (m) and is present exactly for those kinds; ``target_point``
    is present exactly for bucket/chair tasks.
    """

    kind: str
    handle_position: Point3  # m, representative grip point
    object_pose: tuple[float, float, float]  # x, y, yaw of the object base
    size_extents: Point3  # m
    articulation_value: float | None = None
    target_point: Point2 | None = None

    def __post_init__(self) -> None:
        if self.kind not in OBJECT_KINDS:
            raise ValueError(f"unknown object kind {self.kind!r}")
        articulated = self.kind in ("door", "drawer")
        if articulated != (self.articulation_value is not None):
            raise ValueError(f"articulation_value must be present iff kind is door/drawer (kind={self.kind})")
        targeted = self.kind in ("bucket", "chair")
        if targeted != (self.target_point is not None):
            raise ValueError(f"target_point must be present iff kind is bucket/chair (kind={self.kind})")


@dataclass(frozen=True, slots=True)
class Observation:
    """Snapshot handed to sub-task controllers, one per environment step."""

    robot: RobotState
    object: ObjectAttributes
    step_index: int
