"""Closed-loop episode runner.

Each iteration the first unfinished sub-task produces one action, the
stabilizer contribution (once its marker has been passed) is added, the sum
is clamped and handed to the environment. Episodes stop on task success, on
the step cap, or when every sub-task has finished. Markers consume no
environment steps: enabling the stabilizer and stepping the next sub-task
happen within the same iteration.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .core import Action, Observation, Point3, add, clamp, new_action
from .mockenv import EnvConfig, MockEnv
from .plans import Plan, StabilizerOn, resolve
from .subtasks import ArmStabilizer


@dataclass(frozen=True, slots=True)
class StepRecord:
    """One trajectory line: the observation a sub-task saw and what it did."""

    step: int
    label: str
    subtask_index: int
    action: Action  # consumed by the environment (clamped)
    main_action: Action  # sub-task output
    stabilizer_action: Action  # all zeros before the marker
    platform: tuple[float, float, float, float]  # x, y, height, yaw
    joints: tuple[tuple[float, ...], ...]
    object_pose: tuple[float, float, float]
    handle: Point3
    articulation: float | None


@dataclass(frozen=True, slots=True)
class EpisodeResult:
    task_kind: str
    seed: int
    success: bool
    steps: int
    subtask_trace: tuple[int, ...]
    subtask_steps: tuple[int, ...]  # per plan entry, step() invocations
    trajectory: tuple[StepRecord, ...]
    error: str | None = None


@dataclass(frozen=True, slots=True)
class BatchResult:
    task_kind: str
    results: tuple[EpisodeResult, ...]
    success_rate: float
    mean_steps: float


def _record(obs: Observation, idx: int, label: str, main: Action, stab: Action, final: Action) -> StepRecord:
    robot = obs.robot
    return StepRecord(
        step=obs.step_index,
        label=label,
        subtask_index=idx,
        action=final,
        main_action=main,
        stabilizer_action=stab,
        platform=(robot.platform_x, robot.platform_y, robot.platform_height, robot.platform_yaw),
        joints=robot.arm_joints,
        object_pose=obs.object.object_pose,
        handle=obs.object.handle_position,
        articulation=obs.object.articulation_value,
    )


def run_episode(task_kind: str, plan: Plan, env_config: EnvConfig | None = None, seed: int = 0) -> EpisodeResult:
    if plan.task_kind != task_kind:
        raise ValueError(f"plan is for {plan.task_kind!r}, episode requested {task_kind!r}")
    env = MockEnv(task_kind, env_config)
    obs = env.reset(seed)
    subtasks = resolve(plan, obs)
    dim = env.index_map.dim
    zeros = new_action(dim)

    stabilizer: ArmStabilizer | None = None
    idx = 0
    trace: list[int] = []
    records: list[StepRecord] = []
    done = False
    error: str | None = None

    while not done:
        while idx < len(subtasks):
            st = subtasks[idx]
            if isinstance(st, StabilizerOn):
                if stabilizer is None:
                    stabilizer = ArmStabilizer(env.index_map, obs.robot.arm_joints)
                idx += 1
                continue
            if st.done:
                idx += 1
                continue
            break
        if idx >= len(subtasks):
            break  # plan exhausted without success
        st = subtasks[idx]
        try:
            main, _ = st.step(obs)
            stab = stabilizer.step(obs) if stabilizer is not None else zeros
            final = clamp(add(main, stab))
            record = _record(obs, idx, st.label, main, stab, final)
            obs, done = env.step(final)
        except Exception as e:  # noqa: BLE001 - episode failures must not kill a batch
            error = f"step {len(records)}: {e}"
            break
        records.append(record)
        trace.append(idx)

    steps_per_entry = tuple(
        0 if isinstance(st, StabilizerOn) else st.steps_taken for st in subtasks
    )
    return EpisodeResult(
        task_kind=task_kind,
        seed=seed,
        success=env.success() and error is None,
        steps=len(records),
        subtask_trace=tuple(trace),
        subtask_steps=steps_per_entry,
        trajectory=tuple(records),
        error=error,
    )


def _episode_job(args: tuple[str, Plan, EnvConfig | None, int]) -> EpisodeResult:
    task_kind, plan, env_config, seed = args
    return run_episode(task_kind, plan, env_config, seed)


def run_batch(
    task_kind: str,
    plan: Plan,
    env_config: EnvConfig | None = None,
    seeds: list[int] | tuple[int, ...] = (),
    jobs: int = 1,
) -> BatchResult:
    """Run one episode per seed; results are reported sorted by seed."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("run_batch requires at least one seed")
    if jobs > 1:
        work = [(task_kind, plan, env_config, s) for s in seeds]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_episode_job, work))
    else:
        results = [run_episode(task_kind, plan, env_config, s) for s in seeds]
    results.sort(key=lambda r: r.seed)
    successes = sum(1 for r in results if r.success)
    mean_steps = sum(r.steps for r in results) / len(results)
    return BatchResult(
        task_kind=task_kind,
        results=tuple(results),
        success_rate=successes / len(results),
        mean_steps=mean_steps,
    )


def replay_actions(
    task_kind: str,
    env_config: EnvConfig | None,
    seed: int,
    actions: list[Action] | tuple[Action, ...],
) -> list[Observation]:
    """Re-run a logged action sequence; returns the observation each action saw.

    With the same task, seed and config this reproduces the logged episode
    exactly, including the disturbance noise stream.
    """
    env = MockEnv(task_kind, env_config)
    obs = env.reset(seed)
    seen = []
    for act in actions:
        seen.append(obs)
        obs, _ = env.step(act)
    return seen
