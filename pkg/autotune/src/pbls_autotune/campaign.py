"""Campaign driver: greedy rounds over every slot, one at a time.

The working tree is a snapshot of the solver package; each round may rewrite
exactly one slot region, and winners propagate immediately so later rounds
adapt to them. Every round persists its artifacts in round-NN/ with
verdict.json written last, which makes an interrupted campaign resumable:
completed rounds are skipped, a half-finished round directory is redone.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

from pbls.bench import read_records_jsonl, run_batch, write_records_jsonl

from .candidate import solver_argv, solver_env
from .config import OrchestratorConfig
from .llm import make_backend
from .rounds import run_round


def _training_records(config: OrchestratorConfig, tree_dir: str, solver_id: str):
    extra = []
    if config.training_max_steps is not None:
        extra = ["--max-steps", str(config.training_max_steps)]
    return run_batch(
        solver_argv(tree_dir, config.solver_package),
        config.training_instances,
        config.training_cutoff_ms,
        list(config.seeds),
        config.parallelism,
        solver_id=solver_id,
        env=solver_env(tree_dir),
        extra_args=extra,
    )


def _wins_vs(records, reference) -> int:
    cells = {(r.instance_id, r.seed): r for r in reference}
    wins = 0
    for r in records:
        if r.status != "feasible":
            continue
        base = cells[(r.instance_id, r.seed)]
        if base.status != "feasible" or r.obj < base.obj:
            wins += 1
    return wins


def run_campaign(config: OrchestratorConfig) -> dict:
    """Run (or resume) a full campaign; returns the final report dict."""
    campaign = Path(config.campaign_dir)
    campaign.mkdir(parents=True, exist_ok=True)
    (campaign / "config.json").write_text(config.to_json() + "\n", encoding="utf-8")

    working = campaign / "working"
    if not (working / config.solver_package).exists():
        shutil.copytree(
            Path(config.solver_source) / config.solver_package,
            working / config.solver_package,
            ignore=shutil.ignore_patterns("__pycache__"),
        )

    backend = make_backend(config)

    original_path = campaign / "original-records.jsonl"
    if original_path.exists():
        original_records = read_records_jsonl(original_path)
    else:
        original_records = _training_records(config, str(working), "original")
        write_records_jsonl(original_records, original_path)

    incumbent_path = campaign / "incumbent-records.jsonl"
    incumbent_records = (
        read_records_jsonl(incumbent_path) if incumbent_path.exists() else original_records
    )

    total_rounds = len(config.slot_order) * config.sweeps
    executed_cap = total_rounds if config.max_rounds is None else min(
        total_rounds, config.max_rounds
    )

    rounds_summary = []
    for round_index in range(executed_cap):
        round_dir = campaign / f"round-{round_index:02d}"
        verdict_file = round_dir / "verdict.json"
        slot = config.slot_order[round_index % len(config.slot_order)]
        if verdict_file.exists():
            continue  # completed in a previous invocation
        if round_dir.exists():
            shutil.rmtree(round_dir)  # half-finished round: redo it
        result = run_round(config, str(working), round_index, slot, backend,
                           incumbent_records)
        if result.propagated and result.winner_records:
            incumbent_records = result.winner_records
            write_records_jsonl(incumbent_records, incumbent_path)
        write_records_jsonl(incumbent_records, round_dir / "incumbent-records.jsonl")

    # report over everything completed so far
    for round_index in range(total_rounds):
        verdict_file = campaign / f"round-{round_index:02d}" / "verdict.json"
        if not verdict_file.exists():
            break
        verdict = json.loads(verdict_file.read_text(encoding="utf-8"))
        snapshot = read_records_jsonl(
            campaign / f"round-{round_index:02d}" / "incumbent-records.jsonl"
        )
        rounds_summary.append(
            {
                "round": round_index,
                "slot": verdict["slot"],
                "selected": verdict["selected"],
                "propagated": verdict["propagated"],
                "barren_reason": verdict.get("barren_reason"),
                "incumbent_feasible": sum(1 for r in snapshot if r.status == "feasible"),
                "incumbent_wins_vs_original": _wins_vs(snapshot, original_records),
            }
        )

    final_records = (
        read_records_jsonl(incumbent_path) if incumbent_path.exists() else original_records
    )
    report = {
        "schema": 1,
        "completed_rounds": len(rounds_summary),
        "total_rounds": total_rounds,
        "complete": len(rounds_summary) == total_rounds,
        "original_feasible": sum(1 for r in original_records if r.status == "feasible"),
        "final_feasible": sum(1 for r in final_records if r.status == "feasible"),
        "final_wins_vs_original": _wins_vs(final_records, original_records),
        "rounds": rounds_summary,
    }
    (campaign / "campaign-report.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8"
    )

    lines = [
        "# Campaign report",
        "",
        f"- rounds completed: {report['completed_rounds']}/{report['total_rounds']}",
        f"- training feasibility: {report['original_feasible']} -> {report['final_feasible']}",
        f"- final wins vs original baseline: {report['final_wins_vs_original']}",
        "",
        "| round | slot | selected | propagated | feasible | wins vs original |",
        "|------:|------|----------|------------|---------:|-----------------:|",
    ]
    for r in rounds_summary:
        lines.append(
            f"| {r['round']} | {r['slot']} | {r['selected']} | {r['propagated']} "
            f"| {r['incumbent_feasible']} | {r['incumbent_wins_vs_original']} |"
        )
    (campaign / "campaign-report.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return report
