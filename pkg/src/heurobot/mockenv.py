"""Deterministic kinematic mock of the four manipulation tasks.

Pure pose evolution, no forces: the platform and arm joints integrate
commanded velocities with explicit Euler at a fixed dt, fingertips follow a
simplified forward chain, and grasping is a binary attachment with
hysteresis. Arms carrying an attached load receive seeded per-joint noise as
a stand-in for reaction forces. Everything is reproducible bit-for-bit from
(task, seed, action sequence).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields

from .core import (
    TASK_OBJECT,
    TASK_ROBOT,
    Action,
    ActionIndexMap,
    ObjectAttributes,
    Observation,
    Point3,
    RobotState,
    clamp,
    wrap_angle,
)

# ---------------------------------------------------------------- geometry

ARM_MOUNT_X = 0.08  # m, arm base ahead of platform center
ARM_MOUNT_Y = 0.25  # m, lateral arm base offset (dual-arm robots, +/-)
ARM_LINK = 0.22  # m, both links of the planar chain
ARM_BASE_Z = 0.05  # m, arm base above platform height
ARM_SWING_SPAN = 0.25  # m, lateral fingertip travel per sin(q0)

# Grasp-ready arm pose: the planar links are solved so the fingertip sits
# 0.35 m ahead of the platform center and 0.15 m above platform height.
READY_POSE = (0.0, 1.21191, -1.71442, 0.0, -0.35, 0.0, 0.25, 0.0)

PLATFORM_SPAWN_HEIGHT = 0.40  # m
HEIGHT_LIMITS = (0.10, 1.20)  # m, platform height travel
PLATFORM_TOP_HEIGHT = 0.25  # m, top surface of the bucket target platform
PLATFORM_EXTENT = 0.30  # m, radius of the target platform top

DETACH_OPEN_STEPS = 3  # consecutive opening commands before release
NOISE_TRUNCATION = 3.0  # disturbance draws clipped at 3 sigma

CHAIR_GRIP_HALF_DEPTH = 0.16  # m
CHAIR_GRIP_HALF_WIDTH = 0.34  # m


def finger_local(joints: tuple[float, ...], mount_y: float) -> Point3:
    """Fingertip position in the platform frame (x forward, y left, z up)."""
    reach = ARM_MOUNT_X + ARM_LINK * (math.cos(joints[1]) + math.cos(joints[1] + joints[2]))
    lateral = mount_y + ARM_SWING_SPAN * math.sin(joints[0])
    rise = ARM_BASE_Z + ARM_LINK * (math.sin(joints[1]) + math.sin(joints[1] + joints[2]))
    return reach, lateral, rise


_READY_REACH, _, _READY_RISE = finger_local(READY_POSE, 0.0)
READY_FINGER_FORWARD = _READY_REACH  # ~0.35 m
READY_FINGER_RISE = _READY_RISE  # ~0.15 m
_SPAWN_FINGER_Z = PLATFORM_SPAWN_HEIGHT + READY_FINGER_RISE


# ---------------------------------------------------------------- config


@dataclass(frozen=True, slots=True)
class EnvConfig:
    """Tunables of the mock environment; defaults are the reference setup."""

    dt: float = 0.05  # s per step
    linear_velocity_scale: float = 1.0  # m/s per unit command
    angular_velocity_scale: float = 1.0  # rad/s per unit command
    disturbance_std: float = 0.01  # rad per step, attached arms only
    grasp_radius: float = 0.05  # m, attach distance
    door_success_fraction: float = 0.9
    drawer_success_fraction: float = 0.9
    bucket_xy_tolerance: float = 0.10  # m
    bucket_height_tolerance: float = 0.05  # m
    chair_xy_tolerance: float = 0.15  # m
    max_steps: int = 200
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.disturbance_std < 0:
            raise ValueError("disturbance_std must be non-negative")
        for name in (
            "linear_velocity_scale",
            "angular_velocity_scale",
            "grasp_radius",
            "door_success_fraction",
            "drawer_success_fraction",
            "bucket_xy_tolerance",
            "bucket_height_tolerance",
            "chair_xy_tolerance",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict) -> "EnvConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown environment config keys: {sorted(unknown)}")
        return cls(**data)

    def to_mapping(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# ---------------------------------------------------------------- layout


@dataclass(frozen=True, slots=True)
class Layout:
    """Episode geometry drawn at reset. Fields unused by a task stay None."""

    robot_xy: tuple[float, float]
    robot_yaw: float
    handle0: Point3 | None = None  # door/drawer grip point at articulation 0
    axis: tuple[float, float] | None = None  # articulation axis, outward
    door_radius: float | None = None  # m, handle lever arm around the hinge
    art_target: float | None = None  # rad (door) or m (drawer)
    art_range: float | None = None  # articulation hard stop
    object_xy: tuple[float, float] | None = None
    object_yaw: float = 0.0
    rim_radius: float | None = None  # m, bucket rim circle
    object_height: float | None = None  # m, bucket rim above its base
    grip_z: float | None = None  # m, chair grip band height
    target: tuple[float, float] | None = None
    extents: Point3 = (0.0, 0.0, 0.0)


def _sample_layout(task_kind: str, rng: random.Random) -> Layout:
    rx = rng.uniform(-0.05, 0.05)
    ry = rng.uniform(-0.05, 0.05)
    if task_kind in ("open_cabinet_door", "open_cabinet_drawer"):
        yaw0 = rng.uniform(-0.20, 0.20)
        bearing = rng.uniform(-0.35, 0.35)
        dist = rng.uniform(0.60, 0.85)
        handle_z = rng.uniform(0.45, 0.68)
        ux, uy = math.cos(bearing), math.sin(bearing)
        handle0 = (rx + dist * ux, ry + dist * uy, handle_z)
        if task_kind == "open_cabinet_door":
            door_radius = rng.uniform(0.28, 0.40)
            art_target = rng.uniform(0.50, 0.70)
            art_range = art_target + 0.15
        else:
            door_radius = None
            art_target = rng.uniform(0.22, 0.30)
            art_range = art_target + 0.08
        return Layout(
            robot_xy=(rx, ry),
            robot_yaw=yaw0,
            handle0=handle0,
            axis=(-ux, -uy),
            door_radius=door_radius,
            art_target=art_target,
            art_range=art_range,
            object_xy=(handle0[0] + 0.25 * ux, handle0[1] + 0.25 * uy),
            object_yaw=wrap_angle(bearing + math.pi),
            extents=(0.9, 0.9, 1.4),
        )
    if task_kind == "move_bucket":
        yaw0 = rng.uniform(-0.15, 0.15)
        bearing = rng.uniform(-1.5, 1.5)
        dist = rng.uniform(0.33, 0.37)
        rim_radius = rng.uniform(0.25, 0.27)
        # no height-align step exists for this task, so the rim must spawn
        # within the grasp ball of the ready-pose fingertip height
        height = rng.uniform(_SPAWN_FINGER_Z - 0.02, _SPAWN_FINGER_Z + 0.02)
        target_bearing = bearing + rng.uniform(-0.8, 0.8)
        target_dist = rng.uniform(0.70, 1.00)
        return Layout(
            robot_xy=(rx, ry),
            robot_yaw=yaw0,
            object_xy=(rx + dist * math.cos(bearing), ry + dist * math.sin(bearing)),
            object_yaw=rng.uniform(-math.pi, math.pi),
            rim_radius=rim_radius,
            object_height=height,
            target=(rx + target_dist * math.cos(target_bearing), ry + target_dist * math.sin(target_bearing)),
            extents=(2 * rim_radius, 2 * rim_radius, height),
        )
    if task_kind == "push_chair":
        yaw0 = rng.uniform(-0.04, 0.04)
        cx = rx + rng.uniform(0.60, 0.76)
        cy = ry + rng.uniform(-0.04, 0.04)
        grip_z = rng.uniform(0.45, 0.68)
        return Layout(
            robot_xy=(rx, ry),
            robot_yaw=yaw0,
            object_xy=(cx, cy),
            object_yaw=rng.uniform(-0.06, 0.06),
            grip_z=grip_z,
            target=(cx + rng.uniform(1.0, 1.5), cy + rng.uniform(-0.08, 0.08)),
            extents=(2 * CHAIR_GRIP_HALF_DEPTH, 2 * CHAIR_GRIP_HALF_WIDTH, grip_z + 0.15),
        )
    raise ValueError(f"unknown task kind {task_kind!r}")


# ---------------------------------------------------------------- state


@dataclass
class Carry:
    """Rigid offset of a held object, recorded in the mid-finger frame."""

    local_x: float
    local_y: float
    z_off: float
    yaw_off: float


@dataclass
class EnvState:
    """Mutable simulation state; snapshot values themselves are immutable."""

    robot: RobotState
    object: ObjectAttributes
    attachments: list[str | None]
    step: int
    noise_rng: random.Random
    layout: Layout
    articulation: float = 0.0
    object_xy: tuple[float, float] = (0.0, 0.0)
    object_yaw: float = 0.0
    object_z: float = 0.0  # bucket base above ground
    carry: Carry | None = None
    open_counts: list[int] = field(default_factory=list)
    prev_fingers: tuple[Point3, ...] = ()


class MockEnv:
    """Seeded kinematic environment with a gym-style reset/step surface.

    ``step`` consumes one action vector and returns ``(observation, done)``;
    ``done`` is raised once the task's success predicate holds or the step
    cap is reached.
    """

    def __init__(self, task_kind: str, config: EnvConfig | None = None):
        if task_kind not in TASK_OBJECT:
            raise ValueError(f"unknown task kind {task_kind!r}")
        self.task_kind = task_kind
        self.object_kind = TASK_OBJECT[task_kind]
        self.config = config if config is not None else EnvConfig()
        self.robot_config = TASK_ROBOT[task_kind]
        self.index_map = ActionIndexMap.for_robot(self.robot_config)
        self.state: EnvState | None = None
        self._done = False

    # ------------------------------------------------------------- reset

    def reset(self, seed: int) -> Observation:
        cfg = self.config
        layout_rng = random.Random(f"{cfg.rng_seed}:{seed}:layout")
        noise_rng = random.Random(f"{cfg.rng_seed}:{seed}:noise")
        layout = _sample_layout(self.task_kind, layout_rng)

        n_arms = len(self.robot_config.arms)
        joints = tuple(READY_POSE for _ in range(n_arms))
        state = EnvState(
            robot=None,  # type: ignore[arg-type]  # filled below
            object=None,  # type: ignore[arg-type]
            attachments=[None] * n_arms,
            step=0,
            noise_rng=noise_rng,
            layout=layout,
            object_xy=layout.object_xy if layout.object_xy else (0.0, 0.0),
            object_yaw=layout.object_yaw,
            object_z=0.0,
            open_counts=[0] * n_arms,
        )
        self.state = state
        self._done = False
        self._platform = [layout.robot_xy[0], layout.robot_xy[1], PLATFORM_SPAWN_HEIGHT, layout.robot_yaw]
        self._joints = [list(READY_POSE) for _ in range(n_arms)]
        fingers = self._compute_fingers()
        state.prev_fingers = fingers
        state.robot = self._robot_state(fingers)
        state.object = self._object_attributes()
        return self._observation()

    # ------------------------------------------------------------- step

    def step(self, action: Action) -> tuple[Observation, bool]:
        state = self.state
        if state is None:
            raise RuntimeError("reset() must be called before step()")
        if self._done:
            raise RuntimeError("episode already done; reset() to start a new one")
        if len(action) != self.index_map.dim:
            raise ValueError(f"action dimension {len(action)} != {self.index_map.dim}")
        if not all(math.isfinite(v) for v in action):
            raise ValueError("action contains non-finite components")
        act = clamp(action)
        cfg = self.config
        lin = cfg.linear_velocity_scale * cfg.dt
        ang = cfg.angular_velocity_scale * cfg.dt

        p = self._platform
        p[0] += act[0] * lin
        p[1] += act[1] * lin
        p[3] = wrap_angle(p[3] + act[2] * ang)
        p[2] = min(max(p[2] + act[3] * lin, HEIGHT_LIMITS[0]), HEIGHT_LIMITS[1])

        for arm in range(len(self._joints)):
            slots = self.index_map.arm_joint_slots(arm)
            q = self._joints[arm]
            for j, slot in enumerate(slots):
                q[j] += act[slot] * ang
            if state.attachments[arm] is not None:
                # reaction-force proxy: seeded noise on loaded arms only
                for j in range(len(q)):
                    q[j] += self._noise()

        fingers = self._compute_fingers()
        self._update_object(fingers, lin)
        self._update_attachments(act, fingers)
        state.prev_fingers = fingers
        state.step += 1

        state.robot = self._robot_state(fingers)
        state.object = self._object_attributes()
        done = self.success() or state.step >= cfg.max_steps
        self._done = done
        return self._observation(), done

    # ------------------------------------------------------------- success

    def success(self) -> bool:
        state = self.state
        if state is None:
            return False
        cfg = self.config
        lay = state.layout
        if self.object_kind == "door":
            return state.articulation >= cfg.door_success_fraction * lay.art_target
        if self.object_kind == "drawer":
            return state.articulation >= cfg.drawer_success_fraction * lay.art_target
        if self.object_kind == "bucket":
            if any(a is not None for a in state.attachments):
                return False
            dx = state.object_xy[0] - lay.target[0]
            dy = state.object_xy[1] - lay.target[1]
            return (
                math.hypot(dx, dy) <= cfg.bucket_xy_tolerance
                and abs(state.object_z - PLATFORM_TOP_HEIGHT) <= cfg.bucket_height_tolerance
            )
        dx = state.object_xy[0] - lay.target[0]
        dy = state.object_xy[1] - lay.target[1]
        return math.hypot(dx, dy) <= cfg.chair_xy_tolerance

    # ------------------------------------------------------------- internals

    def _noise(self) -> float:
        std = self.config.disturbance_std
        v = self.state.noise_rng.normalvariate(0.0, std)
        bound = NOISE_TRUNCATION * std
        return min(max(v, -bound), bound)

    def _compute_fingers(self) -> tuple[Point3, ...]:
        px, py, ph, yaw = self._platform
        cos_y, sin_y = math.cos(yaw), math.sin(yaw)
        single = len(self._joints) == 1
        out = []
        for arm, q in enumerate(self._joints):
            mount = 0.0 if single else (ARM_MOUNT_Y if arm == 0 else -ARM_MOUNT_Y)
            reach, lateral, rise = finger_local(tuple(q), mount)
            out.append(
                (
                    px + cos_y * reach - sin_y * lateral,
                    py + sin_y * reach + cos_y * lateral,
                    ph + rise,
                )
            )
        return tuple(out)

    def _mid_fingers(self, fingers: tuple[Point3, ...]) -> Point3:
        n = len(fingers)
        return (
            sum(f[0] for f in fingers) / n,
            sum(f[1] for f in fingers) / n,
            sum(f[2] for f in fingers) / n,
        )

    def _update_object(self, fingers: tuple[Point3, ...], lin: float) -> None:
        """Object pose response to the (pre-transition) attachment state."""
        state = self.state
        lay = state.layout
        if self.object_kind in ("door", "drawer"):
            if state.attachments[0] is not None:
                dx = fingers[0][0] - state.prev_fingers[0][0]
                dy = fingers[0][1] - state.prev_fingers[0][1]
                proj = dx * lay.axis[0] + dy * lay.axis[1]
                if proj > 0.0:  # articulated joints ratchet; plans never push back
                    gain = 1.0 / lay.door_radius if self.object_kind == "door" else 1.0
                    state.articulation = min(state.articulation + proj * gain, lay.art_range)
            return
        held = all(a is not None for a in state.attachments)
        if held and state.carry is not None:
            mid = self._mid_fingers(fingers)
            yaw = self._platform[3]
            c, s = math.cos(yaw), math.sin(yaw)
            carry = state.carry
            state.object_xy = (
                mid[0] + c * carry.local_x - s * carry.local_y,
                mid[1] + s * carry.local_x + c * carry.local_y,
            )
            state.object_yaw = wrap_angle(yaw + carry.yaw_off)
            if self.object_kind == "bucket":
                state.object_z = max(mid[2] + carry.z_off, 0.0)
        elif self.object_kind == "bucket" and not any(a is not None for a in state.attachments):
            # released load settles, rate-limited, onto whatever supports it
            dx = state.object_xy[0] - lay.target[0]
            dy = state.object_xy[1] - lay.target[1]
            support = PLATFORM_TOP_HEIGHT if math.hypot(dx, dy) <= PLATFORM_EXTENT else 0.0
            if state.object_z > support:
                state.object_z = max(support, state.object_z - lin)

    def _grip_distance(self, arm: int, fingers: tuple[Point3, ...]) -> float:
        """Distance from a fingertip to the object's grip feature."""
        state = self.state
        lay = state.layout
        fx, fy, fz = fingers[arm]
        if self.object_kind in ("door", "drawer"):
            hx, hy, hz = self._handle_position()
            return math.sqrt((fx - hx) ** 2 + (fy - hy) ** 2 + (fz - hz) ** 2)
        ox, oy = state.object_xy
        if self.object_kind == "bucket":
            rim_z = state.object_z + lay.object_height
            radial = math.hypot(fx - ox, fy - oy) - lay.rim_radius
            return math.hypot(radial, fz - rim_z)
        # chair: point-to-box distance against the grip band, in the chair frame
        c, s = math.cos(state.object_yaw), math.sin(state.object_yaw)
        local_x = c * (fx - ox) + s * (fy - oy)
        local_y = -s * (fx - ox) + c * (fy - oy)
        dx = max(0.0, abs(local_x) - CHAIR_GRIP_HALF_DEPTH)
        dy = max(0.0, abs(local_y) - CHAIR_GRIP_HALF_WIDTH)
        return math.sqrt(dx * dx + dy * dy + (fz - lay.grip_z) ** 2)

    def _update_attachments(self, act: Action, fingers: tuple[Point3, ...]) -> None:
        state = self.state
        grasp_radius = self.config.grasp_radius
        released = False
        for arm in range(len(state.attachments)):
            cmd = act[self.index_map.finger_slot(arm)]
            if state.attachments[arm] is None:
                if cmd > 0.0 and self._grip_distance(arm, fingers) <= grasp_radius:
                    state.attachments[arm] = self.object_kind
                    state.open_counts[arm] = 0
            else:
                if cmd < 0.0:
                    state.open_counts[arm] += 1
                    if state.open_counts[arm] >= DETACH_OPEN_STEPS:
                        state.attachments[arm] = None
                        state.open_counts[arm] = 0
                        released = True
                else:
                    state.open_counts[arm] = 0
        if released:
            state.carry = None
        if (
            self.object_kind in ("bucket", "chair")
            and state.carry is None
            and all(a is not None for a in state.attachments)
        ):
            mid = self._mid_fingers(fingers)
            yaw = self._platform[3]
            c, s = math.cos(yaw), math.sin(yaw)
            ox, oy = state.object_xy
            state.carry = Carry(
                local_x=c * (ox - mid[0]) + s * (oy - mid[1]),
                local_y=-s * (ox - mid[0]) + c * (oy - mid[1]),
                z_off=state.object_z - mid[2],
                yaw_off=wrap_angle(state.object_yaw - yaw),
            )

    def _handle_position(self) -> Point3:
        state = self.state
        lay = state.layout
        if self.object_kind in ("door", "drawer"):
            shift = lay.door_radius * state.articulation if self.object_kind == "door" else state.articulation
            return (
                lay.handle0[0] + lay.axis[0] * shift,
                lay.handle0[1] + lay.axis[1] * shift,
                lay.handle0[2],
            )
        ox, oy = state.object_xy
        if self.object_kind == "bucket":
            # representative grip point: the rim point nearest the robot
            dx = self._platform[0] - ox
            dy = self._platform[1] - oy
            norm = math.hypot(dx, dy)
            ux, uy = (dx / norm, dy / norm) if norm > 1e-9 else (1.0, 0.0)
            return (ox + lay.rim_radius * ux, oy + lay.rim_radius * uy, state.object_z + lay.object_height)
        c, s = math.cos(state.object_yaw), math.sin(state.object_yaw)
        return (ox - c * CHAIR_GRIP_HALF_DEPTH, oy - s * CHAIR_GRIP_HALF_DEPTH, lay.grip_z)

    def _robot_state(self, fingers: tuple[Point3, ...]) -> RobotState:
        state = self.state
        return RobotState(
            platform_x=self._platform[0],
            platform_y=self._platform[1],
            platform_height=self._platform[2],
            platform_yaw=self._platform[3],
            arm_joints=tuple(tuple(q) for q in self._joints),
            finger_positions=fingers,
            grasping=tuple(a is not None for a in state.attachments),
        )

    def _object_attributes(self) -> ObjectAttributes:
        state = self.state
        lay = state.layout
        kind = self.object_kind
        articulated = kind in ("door", "drawer")
        if articulated:
            pose = (lay.object_xy[0], lay.object_xy[1], lay.object_yaw)
        else:
            pose = (state.object_xy[0], state.object_xy[1], state.object_yaw)
        return ObjectAttributes(
            kind=kind,
            handle_position=self._handle_position(),
            object_pose=pose,
            size_extents=lay.extents,
            articulation_value=state.articulation if articulated else None,
            target_point=lay.target if kind in ("bucket", "chair") else None,
        )

    def _observation(self) -> Observation:
        state = self.state
        return Observation(robot=state.robot, object=state.object, step_index=state.step)
