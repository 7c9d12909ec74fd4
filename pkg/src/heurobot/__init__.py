"""Rule-based mobile manipulation: sub-task controllers, solution plans,
a deterministic kinematic mock environment and a seeded episode runner."""

from .core import (
    ActionIndexMap,
    Observation,
    ObjectAttributes,
    RobotConfig,
    RobotState,
    TASK_KINDS,
    add,
    clamp,
    new_action,
)
from .mockenv import EnvConfig, MockEnv
from .orchestrator import BatchResult, EpisodeResult, replay_actions, run_batch, run_episode
from .plans import Plan, PlanError, builtin_plan, load_plan, resolve, serialize_plan
from .subtasks import ArmStabilizer, MoveSteps, MoveTo, SubTaskError

__version__ = "0.1.0"

__all__ = [
    "ActionIndexMap",
    "ArmStabilizer",
    "BatchResult",
    "EnvConfig",
    "EpisodeResult",
    "MockEnv",
    "MoveSteps",
    "MoveTo",
    "Observation",
    "ObjectAttributes",
    "Plan",
    "PlanError",
    "RobotConfig",
    "RobotState",
    "SubTaskError",
    "TASK_KINDS",
    "add",
    "builtin_plan",
    "clamp",
    "load_plan",
    "new_action",
    "replay_actions",
    "resolve",
    "run_batch",
    "run_episode",
    "serialize_plan",
    "__version__",
]
