"""Task solution scripts: ordered sub-task lists in a small JSON plan format.

A plan document is a JSON object with a ``task_kind`` and an ``entries``
list. Every entry carries ``kind`` and ``label``; ``move_steps`` entries add
``action`` (named slot -> value) and ``steps``, ``move_to`` entries add
``slot``, ``selector``, ``target`` and optional ``velocity``/``threshold``,
and ``stabilizer_on`` is a bare marker. Targets are either literal numbers
or expressions from a small closed vocabulary, evaluated once against the
first observation of an episode: later object motion never retargets a
sub-task.

Target expressions:
    handle_x | handle_y | handle_height   coordinates of the grip point
    armrest_height                        alias for handle_height
    target_x | target_y                   goal point coordinates
    facing_yaw:handle|object|target       yaw that faces the named point
    target_edge_x:D | target_edge_y:D     goal point pulled back D meters
                                          toward the robot's start position
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from ..core import (
    TASK_KINDS,
    TASK_OBJECT,
    Observation,
    index_map_for_task,
    wrap_angle,
)
from ..subtasks import MoveSteps, MoveTo, get_selector

MARKER_KIND = "stabilizer_on"
ENTRY_KINDS = ("move_steps", "move_to", MARKER_KIND)

PLAN_SCHEMA_VERSION = 1

# convergence defaults when an entry does not pin its own values
DEFAULT_VELOCITY = 0.5
DEFAULT_THRESHOLDS = {"platform_rotation": 0.02}  # rad; translations below
DEFAULT_THRESHOLD = 0.01  # m


class PlanError(ValueError):
    """Malformed plan document or failed plan resolution."""


@dataclass(frozen=True)
class StabilizerOn:
    """Resolved marker: switch the arm stabilizer on at the current pose."""

    label: str = "stabilizer_on"


@dataclass(frozen=True)
class PlanEntry:
    kind: str
    label: str
    action: dict[str, float] | None = None
    steps: int | None = None
    slot: str | None = None
    selector: str | None = None
    target: float | str | None = None
    velocity: float | None = None
    threshold: float | None = None


@dataclass(frozen=True)
class Plan:
    task_kind: str
    entries: tuple[PlanEntry, ...]

    @property
    def executable_entries(self) -> tuple[PlanEntry, ...]:
        return tuple(e for e in self.entries if e.kind != MARKER_KIND)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(e.kind for e in self.entries)


# ------------------------------------------------------------- validation


def _check_target(target: float | str, where: str) -> None:
    if isinstance(target, (int, float)):
        if not math.isfinite(float(target)):
            raise PlanError(f"{where}: target must be finite")
        return
    if not isinstance(target, str):
        raise PlanError(f"{where}: target must be a number or expression string")
    name, _, arg = target.partition(":")
    if name in ("handle_x", "handle_y", "handle_height", "armrest_height", "target_x", "target_y"):
        if arg:
            raise PlanError(f"{where}: expression {name!r} takes no argument")
        return
    if name == "facing_yaw":
        if arg not in ("handle", "object", "target"):
            raise PlanError(f"{where}: facing_yaw argument must be handle|object|target, got {arg!r}")
        return
    if name in ("target_edge_x", "target_edge_y"):
        if arg:
            try:
                float(arg)
            except ValueError:
                raise PlanError(f"{where}: bad edge offset {arg!r}") from None
        return
    raise PlanError(f"{where}: unknown target expression {target!r}")


def validate_plan(plan: Plan) -> None:
    if plan.task_kind not in TASK_KINDS:
        raise PlanError(f"unknown task kind {plan.task_kind!r}")
    if not plan.entries:
        raise PlanError("plan has no entries")
    index_map = index_map_for_task(plan.task_kind)
    markers = 0
    for i, entry in enumerate(plan.entries):
        where = f"entry {i} ({entry.label!r})"
        if entry.kind not in ENTRY_KINDS:
            raise PlanError(f"{where}: unknown kind {entry.kind!r}")
        if not entry.label:
            raise PlanError(f"{where}: empty label")
        if entry.kind == MARKER_KIND:
            markers += 1
            if markers > 1:
                raise PlanError(f"{where}: duplicate stabilizer_on marker")
            continue
        if entry.kind == "move_steps":
            if entry.steps is None or entry.steps < 1:
                raise PlanError(f"{where}: move_steps requires steps >= 1")
            for name, value in (entry.action or {}).items():
                if not math.isfinite(float(value)):
                    raise PlanError(f"{where}: non-finite action value for {name!r}")
                try:
                    index_map.index_of(name)
                except KeyError as e:
                    raise PlanError(f"{where}: {e.args[0]}") from None
            continue
        # move_to
        if entry.slot is None or entry.selector is None or entry.target is None:
            raise PlanError(f"{where}: move_to requires slot, selector and target")
        try:
            index_map.index_of(entry.slot)
        except KeyError as e:
            raise PlanError(f"{where}: {e.args[0]}") from None
        try:
            get_selector(entry.selector)
        except ValueError as e:
            raise PlanError(f"{where}: {e}") from None
        _check_target(entry.target, where)
        if entry.velocity is not None and not 0.0 < entry.velocity <= 1.0:
            raise PlanError(f"{where}: velocity must be in (0, 1]")
        if entry.threshold is not None and entry.threshold <= 0.0:
            raise PlanError(f"{where}: threshold must be positive")


# ------------------------------------------------------------- resolution


def eval_target(target: float | str, obs: Observation) -> float:
    """Evaluate a target expression against the episode's first observation."""
    if isinstance(target, (int, float)):
        return float(target)
    name, _, arg = target.partition(":")
    obj = obs.object
    robot = obs.robot
    if name == "handle_x":
        return obj.handle_position[0]
    if name == "handle_y":
        return obj.handle_position[1]
    if name in ("handle_height", "armrest_height"):
        return obj.handle_position[2]
    if name in ("target_x", "target_y"):
        if obj.target_point is None:
            raise PlanError(f"target expression {target!r} needs a target point, none for kind {obj.kind!r}")
        return obj.target_point[0] if name == "target_x" else obj.target_point[1]
    if name == "facing_yaw":
        if arg == "handle":
            px, py = obj.handle_position[0], obj.handle_position[1]
        elif arg == "object":
            px, py = obj.object_pose[0], obj.object_pose[1]
        else:
            if obj.target_point is None:
                raise PlanError(f"facing_yaw:target needs a target point, none for kind {obj.kind!r}")
            px, py = obj.target_point
        bearing = math.atan2(py - robot.platform_y, px - robot.platform_x)
        # express the target relative to the current yaw so the rotation
        # never has to cross the +-pi wrap
        return robot.platform_yaw + wrap_angle(bearing - robot.platform_yaw)
    if name in ("target_edge_x", "target_edge_y"):
        if obj.target_point is None:
            raise PlanError(f"target expression {target!r} needs a target point, none for kind {obj.kind!r}")
        offset = float(arg) if arg else 0.35
        tx, ty = obj.target_point
        dx, dy = tx - robot.platform_x, ty - robot.platform_y
        norm = math.hypot(dx, dy)
        if norm < 1e-9:
            raise PlanError("target point coincides with the robot start position")
        ux, uy = dx / norm, dy / norm
        return tx - offset * ux if name == "target_edge_x" else ty - offset * uy
    raise PlanError(f"unknown target expression {target!r}")


def resolve(plan: Plan, init_obs: Observation) -> list[MoveSteps | MoveTo | StabilizerOn]:
    """Instantiate a plan's sub-tasks against the initial observation.

    Targets are evaluated exactly once, here; the returned controllers are
    fresh state machines owned by the calling episode.
    """
    validate_plan(plan)
    expected = TASK_OBJECT[plan.task_kind]
    if init_obs.object.kind != expected:
        raise PlanError(
            f"plan for {plan.task_kind!r} got an observation of a {init_obs.object.kind!r} "
            f"(expected {expected!r})"
        )
    index_map = index_map_for_task(plan.task_kind)
    out: list[MoveSteps | MoveTo | StabilizerOn] = []
    for i, entry in enumerate(plan.entries):
        where = f"entry {i} ({entry.label!r})"
        try:
            if entry.kind == MARKER_KIND:
                out.append(StabilizerOn(label=entry.label))
            elif entry.kind == "move_steps":
                out.append(
                    MoveSteps(
                        fixed_action=index_map.build(entry.action or {}),
                        num_steps=entry.steps,
                        label=entry.label,
                    )
                )
            else:
                threshold = entry.threshold
                if threshold is None:
                    threshold = DEFAULT_THRESHOLDS.get(entry.slot, DEFAULT_THRESHOLD)
                out.append(
                    MoveTo(
                        active_index=index_map.index_of(entry.slot),
                        target=eval_target(entry.target, init_obs),
                        selector=get_selector(entry.selector),
                        action_dim=index_map.dim,
                        velocity=entry.velocity if entry.velocity is not None else DEFAULT_VELOCITY,
                        threshold=threshold,
                        label=entry.label,
                    )
                )
        except PlanError:
            raise
        except (ValueError, KeyError) as e:
            raise PlanError(f"{where}: {e}") from e
    return out


# ------------------------------------------------------------- documents


def _entry_from_obj(obj: dict, index: int) -> PlanEntry:
    if not isinstance(obj, dict):
        raise PlanError(f"entry {index}: expected an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in ENTRY_KINDS:
        raise PlanError(f"entry {index}: unknown kind {kind!r}")
    known = {"kind", "label", "action", "steps", "slot", "selector", "target", "velocity", "threshold"}
    unknown = set(obj) - known
    if unknown:
        raise PlanError(f"entry {index}: unknown keys {sorted(unknown)}")
    action = obj.get("action")
    if action is not None:
        if not isinstance(action, dict):
            raise PlanError(f"entry {index}: action must map slot names to values")
        action = {str(k): float(v) for k, v in action.items()}
    return PlanEntry(
        kind=kind,
        label=str(obj.get("label", kind)),
        action=action,
        steps=obj.get("steps"),
        slot=obj.get("slot"),
        selector=obj.get("selector"),
        target=obj.get("target"),
        velocity=obj.get("velocity"),
        threshold=obj.get("threshold"),
    )


def load_plan(text: str) -> Plan:
    """Parse and validate a plan document; errors carry position info."""
    if not text.strip():
        raise PlanError("empty plan document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise PlanError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise PlanError("plan document must be a JSON object")
    version = doc.get("schema_version", PLAN_SCHEMA_VERSION)
    if version != PLAN_SCHEMA_VERSION:
        raise PlanError(f"unsupported plan schema_version {version!r}")
    entries_obj = doc.get("entries")
    if not isinstance(entries_obj, list):
        raise PlanError("plan document requires an 'entries' list")
    plan = Plan(
        task_kind=str(doc.get("task_kind", "")),
        entries=tuple(_entry_from_obj(o, i) for i, o in enumerate(entries_obj)),
    )
    validate_plan(plan)
    return plan


def load_plan_file(path) -> Plan:
    with open(path, "r", encoding="utf-8") as fh:
        return load_plan(fh.read())


def serialize_plan(plan: Plan) -> str:
    entries = []
    for e in plan.entries:
        obj: dict = {"kind": e.kind, "label": e.label}
        for key in ("action", "steps", "slot", "selector", "target", "velocity", "threshold"):
            value = getattr(e, key)
            if value is not None:
                obj[key] = value
        entries.append(obj)
    doc = {"schema_version": PLAN_SCHEMA_VERSION, "task_kind": plan.task_kind, "entries": entries}
    return json.dumps(doc, indent=2) + "\n"


_builtin_cache: dict[str, Plan] = {}


def builtin_plan(task_kind: str) -> Plan:
    """Bundled solution script for one of the four task kinds."""
    if task_kind not in TASK_KINDS:
        raise PlanError(f"unknown task kind {task_kind!r}")
    if task_kind not in _builtin_cache:
        text = resources.files(__package__).joinpath("data", f"{task_kind}.json").read_text("utf-8")
        _builtin_cache[task_kind] = load_plan(text)
    return _builtin_cache[task_kind]
