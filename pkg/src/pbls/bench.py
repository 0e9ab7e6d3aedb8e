"""Benchmark harness: batch solver runs, competition metrics, version selection.

Solvers are external executables honoring the invocation contract

    <solver> --instance <path> --cutoff-ms <n> --seed <n> --output json

and printing a single JSON object {status, obj?, steps, elapsed_ms} on
stdout. Runs are isolated child processes: one crash or timeout produces one
error record, never a batch failure. Records and metric summaries serialize
as JSON-lines / JSON with a ``schema: 1`` field, plus CSV export for tables.
"""

from __future__ import annotations

import csv
import json
import os
import shutil
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_VERSION = 1

# Default cutoffs: short for optimization-round training, long for final runs.
TRAINING_CUTOFF_MS = 60_000
EVALUATION_CUTOFF_MS = 300_000

# Child processes get this much slack beyond cutoff * 1.1 before being
# killed: interpreter startup must not eat into the solver's own budget.
STARTUP_GRACE_S = 2.0

STATUSES = ("feasible", "infeasible", "error")


class HarnessError(RuntimeError):
    pass


class GridMismatchError(HarnessError):
    """Records do not cover the same instance/seed grid."""


class DataIntegrityError(HarnessError):
    """A reported objective contradicts the claimed per-instance best."""


@dataclass
class RunRecord:
    """Outcome of one solver run on one instance with one seed."""

    instance_id: str
    solver_id: str
    status: str
    obj: int | None = None
    elapsed_ms: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if (self.obj is not None) != (self.status == "feasible"):
            raise ValueError("obj must be present exactly when status is 'feasible'")

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "instance_id": self.instance_id,
            "solver_id": self.solver_id,
            "status": self.status,
            "elapsed_ms": self.elapsed_ms,
            "seed": self.seed,
        }
        if self.obj is not None:
            d["obj"] = self.obj
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            instance_id=d["instance_id"],
            solver_id=d["solver_id"],
            status=d["status"],
            obj=d.get("obj"),
            elapsed_ms=d.get("elapsed_ms", 0),
            seed=d.get("seed", 0),
        )


@dataclass
class DatasetMetrics:
    """Aggregated competition metrics for one solver over one dataset."""

    solver_id: str
    win_count: int
    avg_score: float
    per_instance_scores: dict[str, float] = field(default_factory=dict)
    best_per_instance: dict[str, int] = field(default_factory=dict)
    score_shifts: dict[str, int] = field(default_factory=dict)


@dataclass
class VersionVerdict:
    """Selection outcome for one candidate (or the incumbent) in a round."""

    candidate_id: str
    feasible_count: int
    win_count_vs_baseline: int
    selected: bool


def _solver_argv(solver) -> list[str]:
    argv = [solver] if isinstance(solver, (str, Path)) else [str(t) for t in solver]
    argv = [str(t) for t in argv]
    head = argv[0]
    if shutil.which(head) is None and not os.path.exists(head):
        raise HarnessError(f"solver executable not found: {head}")
    return argv


def _run_one(argv: list[str], instance: str, cutoff_ms: int, seed: int,
             solver_id: str, env: dict | None, extra_args: Sequence[str]) -> RunRecord:
    cmd = argv + [
        "--instance", str(instance),
        "--cutoff-ms", str(cutoff_ms),
        "--seed", str(seed),
        "--output", "json",
    ] + list(extra_args)
    deadline = cutoff_ms / 1000.0 * 1.1 + STARTUP_GRACE_S
    run_env = None
    if env:
        run_env = os.environ.copy()
        run_env.update(env)
    t0 = time.monotonic()
    try:
        proc = subprocess.run(
            cmd, capture_output=True, text=True, timeout=deadline, env=run_env
        )
    except (subprocess.TimeoutExpired, OSError):
        elapsed = int((time.monotonic() - t0) * 1000)
        return RunRecord(str(instance), solver_id, "error", None, elapsed, seed)
    elapsed = int((time.monotonic() - t0) * 1000)
    if proc.returncode != 0:
        return RunRecord(str(instance), solver_id, "error", None, elapsed, seed)
    try:
        payload = json.loads(proc.stdout.strip().splitlines()[-1])
        status = payload["status"]
        if status == "feasible":
            return RunRecord(str(instance), solver_id, "feasible",
                             int(payload["obj"]), elapsed, seed)
        if status == "infeasible":
            return RunRecord(str(instance), solver_id, "infeasible", None, elapsed, seed)
    except (ValueError, KeyError, IndexError, TypeError):
        pass
    return RunRecord(str(instance), solver_id, "error", None, elapsed, seed)


def run_batch(
    solver,
    instances: Sequence[str | Path],
    cutoff_ms: int,
    seeds: Sequence[int],
    parallelism: int = 1,
    *,
    solver_id: str = "solver",
    env: dict | None = None,
    extra_args: Sequence[str] = (),
) -> list[RunRecord]:
    """Run `solver` on every (instance, seed) pair with a bounded worker pool.

    `solver` is a path or an argv prefix (e.g. [python, "-m", "pbls.cli"]).
    A missing executable raises before any run starts; any individual crash
    or timeout yields a status='error' record for that cell only.
    """
    argv = _solver_argv(solver)
    jobs = [(str(inst), seed) for inst in instances for seed in seeds]
    records: list[RunRecord | None] = [None] * len(jobs)
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = {
            pool.submit(_run_one, argv, inst, cutoff_ms, seed, solver_id, env, extra_args): i
            for i, (inst, seed) in enumerate(jobs)
        }
        for fut, i in futures.items():
            records[i] = fut.result()
    return records  # type: ignore[return-value]


def score_shift(best: int) -> int:
    """Shift applied to numerator and denominator when best+1 <= 0, keeping
    the winner at exactly 1 and worse solvers in (0, 1)."""
    return -best if best + 1 <= 0 else 0


def compute_instance_score(best: int, sol: int | None) -> float:
    """Competition score (best+1)/(sol+1); 0 when no solution was reported.

    Negative objectives shift both sides so the best solver still scores 1.
    """
    if sol is None:
        return 0.0
    if sol < best:
        raise DataIntegrityError(f"solution {sol} beats the claimed best {best}")
    shift = score_shift(best)
    return (best + 1 + shift) / (sol + 1 + shift)


def compute_dataset_metrics(records: Iterable[RunRecord]) -> list[DatasetMetrics]:
    """Per-solver #win and avg_score over one dataset.

    Every solver must have exactly one record per instance. Instances where
    no solver is feasible contribute score 0 to everyone and a win to no one.
    Ties on the best objective count as wins for every solver attaining it.
    """
    by_solver: dict[str, dict[str, RunRecord]] = {}
    for rec in records:
        per = by_solver.setdefault(rec.solver_id, {})
        if rec.instance_id in per:
            raise HarnessError(
                f"duplicate record for solver {rec.solver_id!r} on {rec.instance_id!r}"
            )
        per[rec.instance_id] = rec
    if not by_solver:
        return []
    instance_sets = {sid: set(per) for sid, per in by_solver.items()}
    universe = set.union(*instance_sets.values())
    for sid, seen in instance_sets.items():
        if seen != universe:
            missing = sorted(universe - seen)[:3]
            raise GridMismatchError(f"solver {sid!r} is missing instances {missing}")

    best: dict[str, int] = {}
    for inst in universe:
        objs = [
            per[inst].obj
            for per in by_solver.values()
            if per[inst].status == "feasible"
        ]
        if objs:
            best[inst] = min(objs)

    out = []
    for sid, per in by_solver.items():
        scores: dict[str, float] = {}
        shifts: dict[str, int] = {}
        wins = 0
        for inst in sorted(universe):
            if inst not in best:
                scores[inst] = 0.0
                continue
            rec = per[inst]
            sol = rec.obj if rec.status == "feasible" else None
            scores[inst] = compute_instance_score(best[inst], sol)
            shift = score_shift(best[inst])
            if shift:
                shifts[inst] = shift
            if sol is not None and sol == best[inst]:
                wins += 1
        avg = sum(scores.values()) / len(scores) if scores else 0.0
        out.append(DatasetMetrics(sid, wins, avg, scores, dict(best), shifts))
    return out


def _cells(records: Iterable[RunRecord]) -> dict[tuple[str, int], RunRecord]:
    cells: dict[tuple[str, int], RunRecord] = {}
    for rec in records:
        key = (rec.instance_id, rec.seed)
        if key in cells:
            raise HarnessError(f"duplicate record for cell {key}")
        cells[key] = rec
    return cells


def select_best_version(
    candidates: Sequence[tuple[str, Sequence[RunRecord]]],
    baseline: Sequence[RunRecord],
    *,
    incumbent_id: str = "incumbent",
) -> list[VersionVerdict]:
    """Greedy round selection: lexicographic (feasible_count, wins vs baseline).

    A candidate replaces the incumbent only when strictly better on that key;
    feasibility outranks wins because it is the harder property for local
    search. Any full tie keeps the incumbent (its verdict carries
    selected=True). Candidate ties are broken by input order.
    """
    base_cells = _cells(baseline)
    base_feasible = sum(1 for r in base_cells.values() if r.status == "feasible")

    scored: list[tuple[str, int, int]] = []
    for cand_id, recs in candidates:
        cells = _cells(recs)
        if set(cells) != set(base_cells):
            raise GridMismatchError(
                f"candidate {cand_id!r} ran a different instance/seed grid than the baseline"
            )
        feas = sum(1 for r in cells.values() if r.status == "feasible")
        wins = 0
        for key, rec in cells.items():
            if rec.status != "feasible":
                continue
            base = base_cells[key]
            if base.status != "feasible" or rec.obj < base.obj:
                wins += 1
        scored.append((cand_id, feas, wins))

    best_key = (base_feasible, 0)
    selected: str | None = None
    for cand_id, feas, wins in scored:
        if (feas, wins) > best_key:
            best_key = (feas, wins)
            selected = cand_id

    verdicts = [
        VersionVerdict(cand_id, feas, wins, selected == cand_id)
        for cand_id, feas, wins in scored
    ]
    verdicts.append(
        VersionVerdict(incumbent_id, base_feasible, 0, selected is None)
    )
    return verdicts


# -- serialization -----------------------------------------------------------

def write_records_jsonl(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict()) + "\n")


def read_records_jsonl(path: str | Path) -> list[RunRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(RunRecord.from_dict(json.loads(line)))
    return out


def write_metrics_json(metrics: Sequence[DatasetMetrics], path: str | Path,
                       dataset: str = "") -> None:
    payload = {
        "schema": SCHEMA_VERSION,
        "dataset": dataset,
        "solvers": [
            {
                "solver_id": m.solver_id,
                "win_count": m.win_count,
                "avg_score": m.avg_score,
                "per_instance_scores": m.per_instance_scores,
                "score_shifts": m.score_shifts,
            }
            for m in metrics
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def records_to_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance_id", "solver_id", "status", "obj", "elapsed_ms", "seed"])
        for rec in records:
            writer.writerow([rec.instance_id, rec.solver_id, rec.status,
                             "" if rec.obj is None else rec.obj, rec.elapsed_ms, rec.seed])


def metrics_to_csv(metrics: Sequence[DatasetMetrics], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver_id", "win_count", "avg_score"])
        for m in metrics:
            writer.writerow([m.solver_id, m.win_count, f"{m.avg_score:.4f}"])
