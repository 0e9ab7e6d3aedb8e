"""Benchmark two solver configurations and score them competition-style.

Generates a handful of random instances, runs the CLI as a child process per
(instance, seed) cell through the harness, and aggregates #win / avg_score.
The second configuration is deliberately handicapped (tiny escape sample,
aggressive smoothing) to make the comparison interesting.
"""

import random
import sys
import tempfile
from pathlib import Path

from pbls import compute_dataset_metrics, run_batch, serialize_instance
from pbls.bench import metrics_to_csv, select_best_version, write_records_jsonl
from pbls.model import Literal, Objective, PBConstraint, PBOInstance


def random_instance(rng, n):
    # plant a hidden solution so every instance is satisfiable
    planted = [0] + [rng.randrange(2) for _ in range(n)]
    cons = []
    for cid in range(2 * n):
        while True:
            k = rng.randint(2, min(4, n))
            vs = rng.sample(range(1, n + 1), k)
            terms = tuple((rng.randint(1, 5), Literal(v, rng.random() < 0.3)) for v in vs)
            lhs = sum(a * lit.value(planted) for a, lit in terms)
            if lhs >= 1:
                break
        cons.append(PBConstraint(terms, rng.randint(max(1, lhs - 1), lhs), cid))
    ovars = rng.sample(range(1, n + 1), n // 2)
    obj = Objective(tuple((rng.randint(1, 4), Literal(v)) for v in ovars), 0)
    return PBOInstance(n, tuple(cons), obj)


def trap_instance(gadgets):
    # greedy dead-end gadgets: need weight growth and escape flips to solve
    cons = []
    cid = 0
    for g in range(gadgets):
        a, y, z = 3 * g + 1, 3 * g + 2, 3 * g + 3
        cons.append(PBConstraint(((3, Literal(a)),), 2, cid)); cid += 1
        cons.append(PBConstraint(((2, Literal(a, True)), (1, Literal(y)), (1, Literal(z))), 2, cid)); cid += 1
    return PBOInstance(3 * gadgets, tuple(cons), Objective())


rng = random.Random(99)
workdir = Path(tempfile.mkdtemp(prefix="pbls-bench-"))
instances = []
for i in range(4):
    inst = random_instance(rng, rng.randint(16, 22))
    path = workdir / f"rand{i}.opb"
    path.write_text(serialize_instance(inst))
    instances.append(path)
for i in range(2):
    path = workdir / f"trap{i}.opb"
    path.write_text(serialize_instance(trap_instance(12 + 4 * i)))
    instances.append(path)

solver = [sys.executable, "-m", "pbls.cli"]
common = dict(cutoff_ms=4000, seeds=[1], parallelism=3)

print(f"running 'tuned' configuration on {len(instances)} instances ...")
tuned = run_batch(solver, instances, solver_id="tuned",
                  extra_args=["--max-steps", "4000"], **common)
print("running 'handicapped' configuration ...")
handicapped = run_batch(solver, instances, solver_id="handicapped",
                        extra_args=["--max-steps", "18", "--bms", "1", "--sp", "0.4"],
                        **common)

metrics = compute_dataset_metrics(list(tuned) + list(handicapped))
print()
print(f"{'solver':>14}  {'#win':>4}  {'avg_score':>9}")
for m in metrics:
    print(f"{m.solver_id:>14}  {m.win_count:>4}  {m.avg_score:>9.4f}")

verdicts = select_best_version([("handicapped", handicapped)], tuned,
                               incumbent_id="tuned")
chosen = next(v.candidate_id for v in verdicts if v.selected)
print(f"\nround selection (feasible count first, then wins): keep {chosen!r}")

write_records_jsonl(list(tuned) + list(handicapped), workdir / "records.jsonl")
metrics_to_csv(metrics, workdir / "metrics.csv")
print(f"artifacts written under {workdir}")
