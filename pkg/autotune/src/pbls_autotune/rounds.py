"""One optimization round: plan modifications for a slot, let the editor and
evaluator iterate on candidates, select greedily, propagate the winner."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from pbls.bench import (
    RunRecord,
    run_batch,
    select_best_version,
    write_records_jsonl,
)

from .candidate import CandidateVersion, build_candidate, solver_argv, solver_env
from .config import SLOT_NAMES, OrchestratorConfig
from .llm import BackendError, ChatRequest, call_with_retries
from .prompts import build_prompt
from .slots import extract_code_block, find_region, replace_region

SELECTION_RULE = (
    "lexicographic: max feasible_count, then max win_count_vs_baseline; "
    "any full tie keeps the incumbent"
)


class RoundAborted(RuntimeError):
    """The round cannot proceed (backend refusal, nothing in scope)."""


@dataclass
class RoundPlan:
    target_slot: str
    suggestions: list[str]
    round_index: int
    dropped: list[str] = field(default_factory=list)


@dataclass
class RoundResult:
    round_index: int
    slot: str
    round_dir: str
    verdicts: list
    selected_id: str | None  # None means the incumbent was retained
    propagated: bool
    winner_records: list[RunRecord] | None
    barren_reason: str | None = None


def _parse_suggestions(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        m = re.match(r"^(?:[-*]|\d+[.)])\s+(.*)$", line)
        out.append(m.group(1).strip() if m else line)
    return [s for s in out if s]


def filter_suggestions(suggestions: list[str], target_slot: str) -> tuple[list[str], list[str]]:
    """Keep suggestions that do not reference any other slot by name;
    suggestions naming no slot at all are in scope by context."""
    kept, dropped = [], []
    others = [s for s in SLOT_NAMES if s != target_slot]
    for s in suggestions:
        if any(other in s for other in others):
            dropped.append(s)
        else:
            kept.append(s)
    return kept, dropped


def plan_modifications(backend, solver_code: str, target_slot: str,
                       round_index: int, retries: int = 3) -> RoundPlan:
    """Ask the planner agent for modification plans scoped to one slot."""
    prompt = build_prompt("planner", solver_code)
    request = ChatRequest(
        kind="plan",
        slot=target_slot,
        candidate=0,
        iteration=0,
        system=prompt.system(),
        user=prompt.user(
            f"Target slot for this round: {target_slot}. Propose modification "
            f"plans for this slot only, one per line, each starting with '- '."
        ),
    )
    try:
        text = call_with_retries(backend, request, retries)
    except BackendError as exc:
        raise RoundAborted(f"planner backend failed after {retries} attempts: {exc}") from exc
    suggestions, dropped = filter_suggestions(_parse_suggestions(text), target_slot)
    if not suggestions:
        raise RoundAborted("no in-scope suggestions after filtering")
    return RoundPlan(target_slot, suggestions, round_index, dropped)


def edit_code(backend, solver_code: str, plan: RoundPlan, suggestion: str,
              candidate_idx: int, iteration: int, feedback: str | None,
              working_src: str, dest: Path, config: OrchestratorConfig) -> CandidateVersion:
    """Ask the editor agent for a slot replacement and build it into a
    candidate tree. Out-of-scope responses come back rejected."""
    prompt = build_prompt("editor", solver_code)
    request_text = (
        f"Target slot: {plan.target_slot}.\n"
        f"Modification plan: {suggestion}\n"
    )
    if feedback:
        request_text += f"\nEvaluator feedback on your previous attempt:\n{feedback}\n"
    request = ChatRequest(
        kind="edit",
        slot=plan.target_slot,
        candidate=candidate_idx,
        iteration=iteration,
        system=prompt.system(),
        user=prompt.user(request_text),
    )
    response = call_with_retries(backend, request, config.retries)
    body = extract_code_block(response)
    candidate_id = f"round{plan.round_index:02d}-cand{candidate_idx}-it{iteration}"
    return build_candidate(
        candidate_id,
        working_src,
        plan.target_slot,
        body,
        dest,
        package=config.solver_package,
        heuristics_relpath=config.heuristics_relpath,
    )


def _counts(records, baseline_cells) -> tuple[int, int]:
    feas = sum(1 for r in records if r.status == "feasible")
    wins = 0
    for r in records:
        if r.status != "feasible":
            continue
        base = baseline_cells[(r.instance_id, r.seed)]
        if base.status != "feasible" or r.obj < base.obj:
            wins += 1
    return feas, wins


def evaluate_modification(candidate: CandidateVersion,
                          baseline_records: list[RunRecord],
                          config: OrchestratorConfig) -> str:
    """Run the built candidate on the training grid and compose evaluator
    feedback; failed or trivial candidates get repair guidance instead."""
    if candidate.rejected_reason:
        return (
            f"Rejected without evaluation: {candidate.rejected_reason}. "
            f"Reply with a single function named {candidate.slot!r} (plus its "
            f"version attribute line) and nothing else."
        )
    if candidate.build_status == "compile_error":
        first_line = candidate.build_log.strip().splitlines()
        first_line = first_line[-1] if first_line else "unknown compile error"
        return (
            f"The patched solver failed to build. Compiler output (last line): "
            f"{first_line}\nFull log:\n{candidate.build_log}\nRepair the function; "
            f"keep the same name and signature."
        )
    if candidate.triviality_flag:
        return (
            "The edit is trivial (only renames, comments, or version metadata "
            "changed) and was excluded from evaluation. Make a substantive "
            "behavioral change."
        )

    extra = []
    if config.training_max_steps is not None:
        extra = ["--max-steps", str(config.training_max_steps)]
    records = run_batch(
        solver_argv(candidate.tree_dir, config.solver_package),
        config.training_instances,
        config.training_cutoff_ms,
        list(config.seeds),
        config.parallelism,
        solver_id=candidate.candidate_id,
        env=solver_env(candidate.tree_dir),
        extra_args=extra,
    )
    candidate.eval_records = records

    baseline_cells = {(r.instance_id, r.seed): r for r in baseline_records}
    feas, wins = _counts(records, baseline_cells)
    base_feas = sum(1 for r in baseline_records if r.status == "feasible")
    regressions = []
    for r in records:
        base = baseline_cells[(r.instance_id, r.seed)]
        if base.status == "feasible" and (
            r.status != "feasible" or r.obj > base.obj
        ):
            regressions.append(r.instance_id)
    lines = [
        f"feasible_count: {feas}/{len(records)} (incumbent {base_feas}/{len(baseline_records)})",
        f"win_count_vs_baseline: {wins}",
    ]
    if regressions:
        lines.append("regressions on: " + ", ".join(sorted(set(regressions))))
    if wins == 0 and feas == base_feas:
        lines.append(
            "No wins and identical feasibility: the change is behaviorally "
            "inert on this training set; try a larger modification."
        )
    return "\n".join(lines)


def run_round(config: OrchestratorConfig, working_src: str, round_index: int,
              slot: str, backend, baseline_records: list[RunRecord]) -> RoundResult:
    """plan -> (edit <-> evaluate) per candidate -> select -> propagate.

    All artifacts land under <campaign>/round-NN/; verdict.json is written
    last and marks the round complete.
    """
    round_dir = Path(config.campaign_dir) / f"round-{round_index:02d}"
    round_dir.mkdir(parents=True, exist_ok=True)
    heuristics_path = Path(working_src) / config.heuristics_relpath
    solver_code = heuristics_path.read_text(encoding="utf-8")

    def finish(verdicts, selected_id, propagated, winner_records, barren_reason=None,
               discarded=()):
        payload = {
            "schema": 1,
            "round": round_index,
            "slot": slot,
            "rule": SELECTION_RULE,
            "verdicts": [
                {
                    "candidate_id": v.candidate_id,
                    "feasible_count": v.feasible_count,
                    "win_count_vs_baseline": v.win_count_vs_baseline,
                    "selected": v.selected,
                }
                for v in verdicts
            ],
            "selected": selected_id or "incumbent",
            "propagated": propagated,
            "barren_reason": barren_reason,
            "discarded": list(discarded),
        }
        (round_dir / "verdict.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )
        return RoundResult(round_index, slot, str(round_dir), verdicts, selected_id,
                           propagated, winner_records, barren_reason)

    try:
        plan = plan_modifications(backend, solver_code, slot, round_index, config.retries)
    except RoundAborted as exc:
        (round_dir / "plan.json").write_text(
            json.dumps({"schema": 1, "slot": slot, "aborted": str(exc)}, indent=2) + "\n",
            encoding="utf-8",
        )
        return finish([], None, False, None, barren_reason=str(exc))

    (round_dir / "plan.json").write_text(
        json.dumps(
            {
                "schema": 1,
                "round": round_index,
                "slot": slot,
                "suggestions": plan.suggestions,
                "dropped_off_slot": plan.dropped,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )

    evaluable: list[CandidateVersion] = []
    discarded: list[dict] = []
    for k in range(config.candidates_per_round):
        suggestion = plan.suggestions[k % len(plan.suggestions)]
        cand_dir = round_dir / f"candidate-{k}"
        cand_dir.mkdir(exist_ok=True)
        transcript: list[str] = [f"# Candidate {k}\n\nplan: {suggestion}\n"]
        best: CandidateVersion | None = None
        best_key = None
        feedback: str | None = None
        last: CandidateVersion | None = None
        baseline_cells = {(r.instance_id, r.seed): r for r in baseline_records}
        for it in range(config.editor_evaluator_iterations):
            try:
                cand = edit_code(backend, solver_code, plan, suggestion, k, it,
                                 feedback, working_src, cand_dir, config)
            except BackendError as exc:
                transcript.append(f"## iteration {it}\n\neditor backend stopped: {exc}\n")
                break
            feedback = evaluate_modification(cand, baseline_records, config)
            transcript.append(
                f"## iteration {it}\n\nbuild: {cand.build_status}"
                f"{' (trivial)' if cand.triviality_flag else ''}"
                f"{' rejected: ' + cand.rejected_reason if cand.rejected_reason else ''}\n\n"
                f"evaluator feedback:\n\n{feedback}\n"
            )
            last = cand
            if cand.evaluable and cand.eval_records:
                key = _counts(cand.eval_records, baseline_cells)
                if best is None or key > best_key:
                    best, best_key = cand, key
        keeper = best or last
        if keeper is not None:
            (cand_dir / "patch.diff").write_text(keeper.diff_summary, encoding="utf-8")
            (cand_dir / "build.log").write_text(keeper.build_log + "\n", encoding="utf-8")
            if keeper.eval_records:
                write_records_jsonl(keeper.eval_records, cand_dir / "records.jsonl")
        (cand_dir / "feedback.md").write_text("\n".join(transcript), encoding="utf-8")
        if best is not None:
            evaluable.append(best)
        else:
            reason = "no response" if last is None else (
                last.rejected_reason
                or ("trivial modification" if last.triviality_flag else last.build_status)
            )
            discarded.append({"candidate": k, "reason": reason})

    if not evaluable:
        return finish([], None, False, None,
                      barren_reason="no evaluable candidates", discarded=discarded)

    verdicts = select_best_version(
        [(c.candidate_id, c.eval_records) for c in evaluable], baseline_records
    )
    selected_id = next((v.candidate_id for v in verdicts if v.selected), None)
    if selected_id is None or selected_id == "incumbent":
        return finish(verdicts, None, False, None, discarded=discarded)

    winner = next(c for c in evaluable if c.candidate_id == selected_id)
    new_source = replace_region(solver_code, slot, winner.body)
    heuristics_path.write_text(new_source, encoding="utf-8")
    # sanity: the region must now carry the winner's body
    _, _, spliced = find_region(new_source, slot)
    assert spliced == winner.body.strip("\n")
    return finish(verdicts, selected_id, True, winner.eval_records, discarded=discarded)
