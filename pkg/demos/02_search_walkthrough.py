"""Run the local search engine on a small instance and inspect the run.

The engine is deterministic under a fixed seed: the flip trajectory, step
count, and final objective repeat exactly.
"""

from collections import Counter

from pbls import build_suite, parse_instance, run_search

TEXT = """\
min: +3 x1 +2 x2 +4 x3 +1 x4 +2 x5 ;
+1 x1 +1 x2 +1 x3 >= 2 ;
+2 x2 +1 x4 +1 x5 >= 2 ;
+1 x1 +1 x5 >= 1 ;
+3 x3 +1 x4 >= 1 ;
"""

inst, _ = parse_instance(TEXT, name="walkthrough")
suite = build_suite()

print(f"instance: {inst.num_vars} vars, {len(inst.constraints)} constraints")
print(f"suite: {suite.slot_versions()}")
print()

for seed in (1, 2):
    trace = []
    out = run_search(inst, suite, cutoff_ms=2000, seed=seed, max_steps=3000,
                     on_flip=trace.append)
    flips = Counter(trace)
    hottest = ", ".join(f"x{v} ({n} flips)" for v, n in flips.most_common(3))
    print(f"seed {seed}: {out.status}, objective {out.best_obj}, "
          f"{out.steps_executed} steps in {out.elapsed_ms} ms")
    print(f"  busiest variables: {hottest}")

print()
print("determinism check: same seed twice")
t1, t2 = [], []
a = run_search(inst, suite, 2000, seed=7, max_steps=3000, on_flip=t1.append)
b = run_search(inst, suite, 2000, seed=7, max_steps=3000, on_flip=t2.append)
print(f"  identical trajectories: {t1 == t2}; identical objectives: {a.best_obj == b.best_obj}")
