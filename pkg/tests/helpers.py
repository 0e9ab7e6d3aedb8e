"""Shared generators and independent oracles for the test suite.

The brute-force oracle enumerates every assignment with numpy and never goes
through the solver's incremental machinery, so it can referee it.
"""

from __future__ import annotations

import random

import numpy as np

from pbls.model import (
    Literal,
    Objective,
    PBConstraint,
    PBOInstance,
    RawConstraint,
)

OPS = ("=", ">", ">=", "<", "<=")


def random_raw_constraint(rng: random.Random) -> RawConstraint:
    """Raw constraint over <= 4 variables, coefficients in [-5, 5] \\ {0},
    any operator; duplicate variables and negated literals allowed."""
    k = rng.randint(1, 4)
    terms = []
    for _ in range(k):
        coef = rng.choice([c for c in range(-5, 6) if c != 0])
        terms.append((coef, Literal(rng.randint(1, 4), rng.random() < 0.4)))
    return RawConstraint(terms, rng.choice(OPS), rng.randint(-8, 8))


def eval_raw(raw: RawConstraint, values: list[int]) -> bool:
    """Direct operator semantics on the raw (pre-normalization) constraint."""
    lhs = sum(a * lit.value(values) for a, lit in raw.terms)
    b = raw.threshold
    return {
        "=": lhs == b,
        ">": lhs > b,
        ">=": lhs >= b,
        "<": lhs < b,
        "<=": lhs <= b,
    }[raw.op]


def satisfied_normalized(constraints, values: list[int]) -> bool:
    return all(c.lhs(values) >= c.threshold for c in constraints)


def all_assignments(num_vars: int):
    """Every 0/1 assignment as padded lists (index 0 unused)."""
    for bits in range(1 << num_vars):
        yield [0] + [(bits >> i) & 1 for i in range(num_vars)]


def random_instance(rng: random.Random, max_vars: int = 16,
                    max_cons: int | None = None, with_objective: bool = True) -> PBOInstance:
    """Random normalized instance; satisfiability is not guaranteed."""
    n = rng.randint(3, max_vars)
    m = rng.randint(2, max_cons if max_cons is not None else max(3, 2 * n))
    cons = []
    for cid in range(m):
        k = rng.randint(1, min(4, n))
        vs = rng.sample(range(1, n + 1), k)
        terms = tuple((rng.randint(1, 5), Literal(v, rng.random() < 0.35)) for v in vs)
        total = sum(a for a, _ in terms)
        cons.append(PBConstraint(terms, rng.randint(1, total), cid))
    obj = Objective()
    if with_objective:
        ovars = rng.sample(range(1, n + 1), rng.randint(0, n))
        obj = Objective(
            tuple((rng.randint(1, 5), Literal(v, rng.random() < 0.3)) for v in ovars),
            rng.randint(-5, 5),
        )
    return PBOInstance(n, tuple(cons), obj)


def brute_force_optimum(inst: PBOInstance) -> int | None:
    """Exhaustive optimum over all 2^n assignments; None when infeasible."""
    n = inst.num_vars
    assigns = (np.arange(1 << n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    feas = np.ones(1 << n, dtype=bool)
    for c in inst.constraints:
        lhs = np.zeros(1 << n, dtype=np.int64)
        for a, lit in c.terms:
            col = assigns[:, lit.var - 1]
            lhs += a * ((1 - col) if lit.negated else col)
        feas &= lhs >= c.threshold
    if not feas.any():
        return None
    obj = np.full(1 << n, inst.objective.constant, dtype=np.int64)
    for e, lit in inst.objective.terms:
        col = assigns[:, lit.var - 1]
        obj += e * ((1 - col) if lit.negated else col)
    return int(obj[feas].min())


def stall_instance(gadgets: int = 16) -> PBOInstance:
    """Replicated greedy trap: per gadget g over (a, y, z),
    {3a >= 2, 2~a + y + z >= 2} with unique solution a=y=z=1.

    From states with a=0 and y+z <= 1 no single flip has positive score at
    unit weights (fixing 3a >= 2 gains 2/3 but breaking the second constraint
    costs 3/4), so a greedy-only loop dead-ends; weight growth on the
    violated 3a >= 2 side breaks the tie.
    """
    cons = []
    cid = 0
    for g in range(gadgets):
        a, y, z = 3 * g + 1, 3 * g + 2, 3 * g + 3
        cons.append(PBConstraint(((3, Literal(a)),), 2, cid))
        cid += 1
        cons.append(
            PBConstraint(((2, Literal(a, True)), (1, Literal(y)), (1, Literal(z))), 2, cid)
        )
        cid += 1
    return PBOInstance(3 * gadgets, tuple(cons), Objective())


def triangle_instance() -> PBOInstance:
    """Vertex cover of a triangle: min x1+x2+x3 s.t. xi+xj >= 1; optimum 2."""
    cons = (
        PBConstraint(((1, Literal(1)), (1, Literal(2))), 1, 0),
        PBConstraint(((1, Literal(2)), (1, Literal(3))), 1, 1),
        PBConstraint(((1, Literal(1)), (1, Literal(3))), 1, 2),
    )
    obj = Objective(((1, Literal(1)), (1, Literal(2)), (1, Literal(3))), 0)
    return PBOInstance(3, cons, obj)


def random_normalized_instance(rng: random.Random, max_vars: int = 10) -> PBOInstance:
    """Already-normalized instance for serializer round trips (b >= 1, merged
    variables, positive coefficients, objective constant allowed)."""
    n = rng.randint(1, max_vars)
    m = rng.randint(0, 2 * n)
    cons = []
    for cid in range(m):
        k = rng.randint(1, min(4, n))
        vs = rng.sample(range(1, n + 1), k)
        terms = tuple((rng.randint(1, 9), Literal(v, rng.random() < 0.4)) for v in vs)
        total = sum(a for a, _ in terms)
        cons.append(PBConstraint(terms, rng.randint(1, total), cid))
    ovars = rng.sample(range(1, n + 1), rng.randint(0, n))
    obj = Objective(
        tuple((rng.randint(1, 9), Literal(v, rng.random() < 0.4)) for v in ovars),
        rng.randint(-20, 20),
    )
    return PBOInstance(n, tuple(cons), obj)
