"""Why the weight-update and escape slots matter.

Builds a family of trap gadgets where pure greedy descent dead-ends with no
positive-score flip while the instance is still infeasible. With the weight
update enabled, the violated constraint's weight grows until repairing it
outweighs the collateral damage, and every run solves the instance.
"""

from pbls import build_suite, run_search
from pbls.model import Literal, Objective, PBConstraint, PBOInstance


def trap_instance(gadgets):
    # per gadget over (a, y, z): 3a >= 2 and 2~a + y + z >= 2.
    # Unique solution a=y=z=1; from a=0, y+z<=1 no single flip has positive
    # score at unit weights.
    cons = []
    cid = 0
    for g in range(gadgets):
        a, y, z = 3 * g + 1, 3 * g + 2, 3 * g + 3
        cons.append(PBConstraint(((3, Literal(a)),), 2, cid)); cid += 1
        cons.append(PBConstraint(((2, Literal(a, True)), (1, Literal(y)), (1, Literal(z))), 2, cid)); cid += 1
    return PBOInstance(3 * gadgets, tuple(cons), Objective())


inst = trap_instance(16)
suite = build_suite()

print(f"instance: {inst.num_vars} vars, {len(inst.constraints)} constraints")
print(f"{'seed':>4}  {'greedy-only':>22}  {'full suite':>22}")
greedy_failures = full_successes = 0
for seed in range(10):
    greedy = run_search(inst, suite, 60_000, seed, max_steps=10_000, greedy_only=True)
    full = run_search(inst, suite, 60_000, seed, max_steps=10_000)
    greedy_failures += greedy.status == "no_solution"
    full_successes += full.status == "solution_found"
    print(f"{seed:>4}  {greedy.status:>15} @{greedy.steps_executed:<5}  "
          f"{full.status:>15} @{full.steps_executed:<5}")

print()
print(f"greedy-only failed {greedy_failures}/10 seeds "
      f"(stalls after a handful of flips); full suite solved {full_successes}/10")
