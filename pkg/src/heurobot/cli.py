"""Batch runner and reporting front end.

    heurobot run --task open_cabinet_drawer --seeds 1..100 --out runs/
    heurobot report runs/*_summary.json

``run`` executes seeded episodes and writes one trajectory log per episode
plus a summary document; its exit status says whether the tool ran, not
whether the manipulation succeeded. ``report`` turns summary files into a
per-task table (or a machine-readable aggregate with ``--format machine``).
The output directory defaults to $HEUROBOT_OUT, then ``runs``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .core import TASK_KINDS
from .mockenv import EnvConfig
from .orchestrator import run_batch
from .plans import PlanError, builtin_plan, load_plan_file
from .trajlog import format_report_table, read_summary, report_rows, write_summary, write_trajectory


def parse_seeds(text: str) -> list[int]:
    """Seed list syntax: a single integer, an inclusive range A..B, or a comma list."""
    text = text.strip()
    if not text:
        raise ValueError("empty seed list")
    if "," in text:
        return [int(part) for part in text.split(",")]
    if ".." in text:
        lo_text, _, hi_text = text.partition("..")
        lo, hi = int(lo_text), int(hi_text)
        if hi < lo:
            raise ValueError(f"seed range {text!r} is empty")
        return list(range(lo, hi + 1))
    return [int(text)]


def _load_config(path: str | None) -> EnvConfig:
    if path is None:
        return EnvConfig()
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return EnvConfig.from_mapping(data)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        seeds = parse_seeds(args.seeds)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        if args.plan == "builtin":
            plan = builtin_plan(args.task)
            plan_source = "builtin"
        else:
            plan = load_plan_file(args.plan)
            plan_source = str(args.plan)
        if plan.task_kind != args.task:
            print(f"error: plan is for {plan.task_kind!r}, not {args.task!r}", file=sys.stderr)
            return 2
        config = _load_config(args.config)
    except (OSError, ValueError, PlanError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    batch = run_batch(args.task, plan, config, seeds, jobs=args.jobs)
    for result in batch.results:
        log_path = out_dir / f"{args.task}_seed{result.seed:05d}.jsonl"
        write_trajectory(log_path, result, config, plan_source)
        if not args.quiet:
            status = "ok" if result.success else ("error" if result.error else "fail")
            print(f"seed {result.seed}: {status} in {result.steps} steps")
    summary_path = out_dir / f"{args.task}_summary.json"
    write_summary(summary_path, batch, config, plan_source, seeds)
    print(
        f"{args.task}: {batch.success_rate:.3f} success rate over {len(seeds)} episodes "
        f"(mean {batch.mean_steps:.1f} steps) -> {summary_path}"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    summaries = []
    skipped = 0
    for path in args.summaries:
        try:
            summaries.append(read_summary(path))
        except (OSError, ValueError, json.JSONDecodeError) as e:
            skipped += 1
            print(f"warning: skipping {path}: {e}", file=sys.stderr)
    if not summaries:
        print("error: no readable summary files", file=sys.stderr)
        return 1
    rows = report_rows(summaries)
    if args.format == "machine":
        payload = {
            "tasks": [
                {
                    "task": row.task,
                    "episodes": row.episodes,
                    "successes": row.successes,
                    "success_rate": row.success_rate,
                    "mean_steps": row.mean_steps,
                }
                for row in rows
            ],
            "skipped": skipped,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(format_report_table(rows))
        if skipped:
            print(f"({skipped} file(s) skipped)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heurobot", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run seeded episodes and write logs")
    run_p.add_argument("--task", required=True, choices=TASK_KINDS)
    run_p.add_argument("--plan", default="builtin", help="'builtin' or a plan document path")
    run_p.add_argument("--seeds", default="0", help="N, A..B (inclusive) or comma list")
    run_p.add_argument("--config", default=None, help="environment config JSON")
    run_p.add_argument("--out", default=os.environ.get("HEUROBOT_OUT", "runs"), help="output directory")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel episode workers")
    run_p.add_argument("--quiet", action="store_true", help="suppress per-episode lines")
    run_p.set_defaults(func=cmd_run)

    report_p = sub.add_parser("report", help="tabulate summary files")
    report_p.add_argument("summaries", nargs="+", help="summary JSON files")
    report_p.add_argument("--format", choices=("table", "machine"), default="table")
    report_p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
