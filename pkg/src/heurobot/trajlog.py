"""Trajectory and summary files.

Trajectories are JSON Lines: a self-describing header line followed by one
record per environment step. Keys are sorted and floats keep their shortest
round-trip repr, so identical episodes produce byte-identical files and
determinism checks can diff them directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .mockenv import EnvConfig
from .orchestrator import BatchResult, EpisodeResult

SCHEMA_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def trajectory_lines(result: EpisodeResult, config: EnvConfig, plan_source: str) -> list[str]:
    header = {
        "schema_version": SCHEMA_VERSION,
        "kind": "trajectory",
        "task": result.task_kind,
        "seed": result.seed,
        "plan": plan_source,
        "config": config.to_mapping(),
        "success": result.success,
        "steps": result.steps,
        "error": result.error,
    }
    lines = [_dumps(header)]
    for rec in result.trajectory:
        lines.append(
            _dumps(
                {
                    "step": rec.step,
                    "label": rec.label,
                    "subtask": rec.subtask_index,
                    "action": list(rec.action),
                    "main": list(rec.main_action),
                    "stabilizer": list(rec.stabilizer_action),
                    "platform": list(rec.platform),
                    "joints": [list(q) for q in rec.joints],
                    "object": list(rec.object_pose),
                    "handle": list(rec.handle),
                    "articulation": rec.articulation,
                }
            )
        )
    return lines


def write_trajectory(path, result: EpisodeResult, config: EnvConfig, plan_source: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in trajectory_lines(result, config, plan_source):
            fh.write(line + "\n")


def read_trajectory(path) -> tuple[dict, list[dict]]:
    """Returns (header, records); raises ValueError on schema mismatch."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line]
    if not lines:
        raise ValueError(f"{path}: empty trajectory file")
    header = json.loads(lines[0])
    if header.get("kind") != "trajectory" or header.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: not a schema v{SCHEMA_VERSION} trajectory file")
    return header, [json.loads(line) for line in lines[1:]]


def summary_payload(batch: BatchResult, config: EnvConfig, plan_source: str, seeds: list[int]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "summary",
        "task": batch.task_kind,
        "plan": plan_source,
        "config": config.to_mapping(),
        "seeds": seeds,
        "episodes": [
            {"seed": r.seed, "success": r.success, "steps": r.steps, "error": r.error}
            for r in batch.results
        ],
        "success_rate": batch.success_rate,
        "mean_steps": batch.mean_steps,
    }


def write_summary(path, batch: BatchResult, config: EnvConfig, plan_source: str, seeds: list[int]) -> None:
    payload = summary_payload(batch, config, plan_source, seeds)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def read_summary(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("kind") != "summary" or doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: not a schema v{SCHEMA_VERSION} summary file")
    for key in ("task", "success_rate", "mean_steps", "episodes"):
        if key not in doc:
            raise ValueError(f"{path}: summary missing {key!r}")
    return doc


@dataclass(frozen=True, slots=True)
class ReportRow:
    task: str
    episodes: int
    successes: int
    success_rate: float
    mean_steps: float


def report_rows(summaries: list[dict]) -> list[ReportRow]:
    rows = []
    for doc in summaries:
        episodes = doc["episodes"]
        rows.append(
            ReportRow(
                task=doc["task"],
                episodes=len(episodes),
                successes=sum(1 for e in episodes if e.get("success")),
                success_rate=doc["success_rate"],
                mean_steps=doc["mean_steps"],
            )
        )
    return rows


def format_report_table(rows: list[ReportRow]) -> str:
    lines = [
        f"{'task':<22}{'episodes':>10}{'successes':>11}{'success_rate':>14}{'mean_steps':>12}",
        "-" * 69,
    ]
    for row in rows:
        lines.append(
            f"{row.task:<22}{row.episodes:>10}{row.successes:>11}"
            f"{row.success_rate:>14.3f}{row.mean_steps:>12.1f}"
        )
    return "\n".join(lines)
