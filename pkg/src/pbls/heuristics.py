"""Baseline implementations of the seven swappable heuristic slots.

The search engine is generic over a :class:`HeuristicSuite` of seven
procedures. Each baseline implementation below sits between
``# SLOT-BEGIN <name>`` / ``# SLOT-END <name>`` sentinel comments so that
automated rewriting tools can replace exactly one slot body at a time;
everything outside the sentinels is stable plumbing. Slot signatures are the
contract and must not change:

    initialize_assignment(inst, rng)            -> list of 0/1, len num_vars+1
    penalty_hard(viol, weight, smooth)          -> float
    penalty_obj(obj_value, weight, smooth)      -> float (affine in obj_value)
    calculate_score(hscore, oscore, feasible_found) -> float
    pick_best_variable(candidates, state)       -> variable index
    update_weights(inst, state, policy, rng)    -> (changed constraint ids, obj weight changed)
    pick_escape_variable(inst, state, policy, rng) -> variable index

penalty_obj must stay affine in obj_value: the engine updates a variable's
objective score only when that variable flips, which is exact for affine
penalties and silently wrong otherwise.

State fields slots may read: values, slack, weights, w_obj, smooth, smooth_o,
hscore, oscore, score, age, step, viol_list, cached_obj, objdelta,
found_feasible, and ctx (con_vars, obj_vars). update_weights additionally
mutates weights / w_obj and reports what it changed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PBOInstance


@dataclass
class SmoothingTable:
    """Per-constraint and objective penalty divisors.

    smooth_c[c] = max(1, mean coefficient of c); smooth_o = max(1, mean
    objective coefficient). Normalizes penalties across constraints of
    heterogeneous coefficient scales.
    """

    smooth_c: list[float]
    smooth_o: float


def smoothing_table(inst: PBOInstance) -> SmoothingTable:
    smooth_c = []
    for c in inst.constraints:
        if c.terms:
            smooth_c.append(max(1.0, sum(a for a, _ in c.terms) / len(c.terms)))
        else:
            smooth_c.append(1.0)
    terms = inst.objective.terms
    smooth_o = max(1.0, sum(e for e, _ in terms) / len(terms)) if terms else 1.0
    return SmoothingTable(smooth_c, smooth_o)


@dataclass
class WeightPolicy:
    """Constants steering the dynamic weighting scheme.

    obj_weight_cap None means "derive from the instance": max(1, ceil of the
    mean objective coefficient). sp is the probability that a weight update
    smooths (decrements every hard weight > 1) instead of incrementing.
    """

    hard_increment: int = 1
    obj_increment: int = 1
    obj_weight_cap: int | None = None
    sp: float = 0.0
    bms: int = 50

    def resolve_cap(self, inst: PBOInstance) -> int:
        if self.obj_weight_cap is not None:
            return self.obj_weight_cap
        terms = inst.objective.terms
        if not terms:
            return 1
        return max(1, math.ceil(sum(e for e, _ in terms) / len(terms)))


# SLOT-BEGIN initialize_assignment
def initialize_assignment(inst, rng):
    """Produce a complete starting assignment: every variable uniform 0/1."""
    return [0] + [rng.randrange(2) for _ in range(inst.num_vars)]


initialize_assignment.version = "baseline.initialize_assignment.v0"
# SLOT-END initialize_assignment


# SLOT-BEGIN penalty_hard
def penalty_hard(viol, weight, smooth):
    """Smoothed hard-constraint penalty: weight * violation / smooth."""
    return weight * viol / smooth


penalty_hard.version = "baseline.penalty_hard.v0"
# SLOT-END penalty_hard


# SLOT-BEGIN penalty_obj
def penalty_obj(obj_value, weight, smooth):
    """Smoothed objective penalty: weight * objective / smooth (affine)."""
    return weight * obj_value / smooth


penalty_obj.version = "baseline.penalty_obj.v0"
# SLOT-END penalty_obj


# SLOT-BEGIN calculate_score
def calculate_score(hscore, oscore, feasible_found):
    """Combine hard and objective scores; objective counts only once a
    feasible solution has ever been seen, so constraint repair dominates the
    feasibility-seeking phase."""
    if feasible_found:
        return hscore + oscore
    return hscore


calculate_score.version = "baseline.calculate_score.v0"
# SLOT-END calculate_score


# SLOT-BEGIN pick_best_variable
def pick_best_variable(candidates, state):
    """Argmax of score; ties go to the least recently flipped, then the
    smallest index."""
    score = state.score
    age = state.age
    best = candidates[0]
    best_s = score[best]
    best_a = age[best]
    for v in candidates[1:]:
        s = score[v]
        if s > best_s:
            best, best_s, best_a = v, s, age[v]
        elif s == best_s:
            a = age[v]
            if a < best_a or (a == best_a and v < best):
                best, best_a = v, a
    return best


pick_best_variable.version = "baseline.pick_best_variable.v0"
# SLOT-END pick_best_variable


# SLOT-BEGIN update_weights
def update_weights(inst, state, policy, rng):
    """Escape weighting: bump every violated constraint when infeasible, bump
    the objective weight (up to its cap) when feasible; with probability sp
    smooth instead, decrementing every hard weight above 1. Weights never
    drop below 1. Returns (changed constraint ids, objective weight changed)."""
    if policy.sp > 0.0 and rng.random() < policy.sp:
        changed = []
        for cid, w in enumerate(state.weights):
            if w > 1:
                state.weights[cid] = w - 1
                changed.append(cid)
        return changed, False
    if state.viol_list:
        for cid in state.viol_list:
            state.weights[cid] += policy.hard_increment
        return list(state.viol_list), False
    cap = state.obj_weight_cap
    if state.w_obj < cap:
        state.w_obj = min(cap, state.w_obj + policy.obj_increment)
        return [], True
    return [], False


update_weights.version = "baseline.update_weights.v0"
# SLOT-END update_weights


# SLOT-BEGIN pick_escape_variable
def pick_escape_variable(inst, state, policy, rng):
    """Diversification pick for local optima: sample up to bms variables from
    a random violated constraint (or from objective-improving variables when
    feasible) and return the best-scoring sample, any sign."""
    if state.viol_list:
        cid = state.viol_list[rng.randrange(len(state.viol_list))]
        pool = state.ctx.con_vars[cid]
        if not pool:
            # degenerate 0 >= b constraint: fall back to any violated
            # constraint that still has variables
            pool = next((state.ctx.con_vars[c] for c in state.viol_list if state.ctx.con_vars[c]), None)
        if not pool:
            return rng.randrange(1, inst.num_vars + 1)
    else:
        pool = [v for v in state.ctx.obj_vars if state.objdelta[v] > 0]
        if not pool:
            return rng.randrange(1, inst.num_vars + 1)
    if len(pool) > policy.bms:
        sample = [pool[rng.randrange(len(pool))] for _ in range(policy.bms)]
    else:
        sample = pool
    score = state.score
    age = state.age
    best = sample[0]
    for v in sample[1:]:
        if score[v] > score[best] or (
            score[v] == score[best]
            and (age[v] < age[best] or (age[v] == age[best] and v < best))
        ):
            best = v
    return best


pick_escape_variable.version = "baseline.pick_escape_variable.v0"
# SLOT-END pick_escape_variable


SLOT_NAMES = (
    "initialize_assignment",
    "penalty_hard",
    "penalty_obj",
    "calculate_score",
    "pick_best_variable",
    "update_weights",
    "pick_escape_variable",
)

REGISTRY = {
    name: {getattr(fn, "version", f"baseline.{name}.v0"): fn}
    for name, fn in (
        ("initialize_assignment", initialize_assignment),
        ("penalty_hard", penalty_hard),
        ("penalty_obj", penalty_obj),
        ("calculate_score", calculate_score),
        ("pick_best_variable", pick_best_variable),
        ("update_weights", update_weights),
        ("pick_escape_variable", pick_escape_variable),
    )
}
