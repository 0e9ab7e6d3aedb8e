"""Generic stochastic local search loop over seven heuristic slots.

One iteration: record the best solution when the current assignment is
feasible and improves; if any variable has a strictly positive score, flip
the best one; otherwise update constraint weights and flip an escape pick.
Stop at the wall-clock cutoff (or an optional step budget) and report the
best feasible solution seen, if any.

Slack, the cached objective, and all hard/objective scores are maintained
incrementally: a flip touches only the flipped variable and variables sharing
a constraint with it. Scores are double-precision floats; tests compare them
against :func:`full_recompute` within 1e-9.

Randomness comes from ``random.Random`` (MT19937), so a fixed seed reproduces
the exact flip trajectory.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import heuristics as _baseline
from .model import PBOInstance

SCORE_EPS = 1e-9


class EngineFault(RuntimeError):
    """A heuristic slot broke its contract (e.g. returned an out-of-range variable)."""

    def __init__(self, slot: str, message: str):
        self.slot = slot
        super().__init__(f"slot {slot!r}: {message}")


@dataclass
class HeuristicSuite:
    """The seven interchangeable procedures driving the search.

    Slots are stateless with respect to everything but the instance and the
    SearchState handed to them; see pbls.heuristics for the signatures.
    """

    initialize_assignment: object
    penalty_hard: object
    penalty_obj: object
    calculate_score: object
    pick_best_variable: object
    update_weights: object
    pick_escape_variable: object

    def slot_versions(self) -> dict[str, str]:
        return {
            name: getattr(getattr(self, name), "version", "custom")
            for name in _baseline.SLOT_NAMES
        }


def build_suite(overrides: dict[str, str] | None = None) -> HeuristicSuite:
    """Assemble a suite from the registry; overrides map slot name -> impl name.

    Unknown slot or implementation names raise ValueError before any solving
    starts.
    """
    chosen = {}
    overrides = overrides or {}
    for slot, impl in overrides.items():
        if slot not in _baseline.REGISTRY:
            raise ValueError(f"unknown heuristic slot {slot!r}")
        if impl not in _baseline.REGISTRY[slot]:
            raise ValueError(f"unknown implementation {impl!r} for slot {slot!r}")
    for slot in _baseline.SLOT_NAMES:
        impls = _baseline.REGISTRY[slot]
        if slot in overrides:
            name = overrides[slot]
        elif f"baseline.{slot}.v0" in impls or len(impls) != 1:
            name = f"baseline.{slot}.v0"  # raises below if genuinely absent
        else:
            name = next(iter(impls))  # slot body was rewritten in place
        try:
            chosen[slot] = impls[name]
        except KeyError:
            raise ValueError(f"unknown implementation {name!r} for slot {slot!r}") from None
    return HeuristicSuite(**chosen)


@dataclass
class SearchOutcome:
    status: str  # "solution_found" | "no_solution"
    best_obj: int | None
    best_assignment: list[int] | None
    steps_executed: int
    elapsed_ms: int


class SearchContext:
    """Flattened, read-only view of an instance: term arrays and occurrence lists."""

    def __init__(self, inst: PBOInstance):
        self.inst = inst
        self.num_vars = inst.num_vars
        n = inst.num_vars
        self.con_terms: list[list[tuple[int, int, int]]] = []
        self.con_vars: list[list[int]] = []
        self.con_b: list[int] = []
        self.occ: list[list[tuple[int, int, int]]] = [[] for _ in range(n + 1)]
        for c in inst.constraints:
            terms = [(a, lit.var, int(lit.negated)) for a, lit in c.terms]
            self.con_terms.append(terms)
            self.con_vars.append([v for _, v, _ in terms])
            self.con_b.append(c.threshold)
            for a, v, neg in terms:
                self.occ[v].append((c.cid, a, neg))
        self.obj_occ: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        for e, lit in inst.objective.terms:
            self.obj_occ[lit.var].append((e, int(lit.negated)))
        self.obj_vars = [v for v in range(1, n + 1) if self.obj_occ[v]]
        self.obj_const = inst.objective.constant


class SearchState:
    """All mutable search data: assignment, slacks, weights, scores, ages, best."""

    def __init__(self, ctx: SearchContext, suite: HeuristicSuite,
                 policy: "_baseline.WeightPolicy", rng: random.Random,
                 values: list[int]):
        self.ctx = ctx
        self.suite = suite
        self.policy = policy
        self.rng = rng
        self.values = values
        n = ctx.num_vars
        m = len(ctx.con_terms)
        table = _baseline.smoothing_table(ctx.inst)
        self.smooth = table.smooth_c
        self.smooth_o = table.smooth_o
        self.weights = [1] * m
        self.w_obj = 1
        self.obj_weight_cap = policy.resolve_cap(ctx.inst)

        self.slack = [0] * m
        self.viol_list: list[int] = []
        self.viol_pos = [-1] * m
        for cid in range(m):
            s = -ctx.con_b[cid]
            for a, v, neg in ctx.con_terms[cid]:
                s += a * (values[v] ^ neg)
            self.slack[cid] = s
            if s < 0:
                self.viol_pos[cid] = len(self.viol_list)
                self.viol_list.append(cid)

        obj = ctx.obj_const
        self.objdelta = [0] * (n + 1)
        for v in ctx.obj_vars:
            d = 0
            for e, neg in ctx.obj_occ[v]:
                lit = values[v] ^ neg
                obj += e * lit
                d += e * (2 * lit - 1)
            self.objdelta[v] = d
        self.cached_obj = obj

        ph = suite.penalty_hard
        po = suite.penalty_obj
        self.hscore = [0.0] * (n + 1)
        self.oscore = [0.0] * (n + 1)
        self.contrib: list[list[float]] = []
        for cid in range(m):
            s = self.slack[cid]
            w = self.weights[cid]
            sm = self.smooth[cid]
            pen_now = ph(-s if s < 0 else 0, w, sm)
            row = []
            for a, v, neg in ctx.con_terms[cid]:
                d = a if (values[v] ^ neg) == 0 else -a
                s_after = s + d
                con = pen_now - ph(-s_after if s_after < 0 else 0, w, sm)
                row.append(con)
                self.hscore[v] += con
            self.contrib.append(row)
        for v in ctx.obj_vars:
            self.oscore[v] = po(obj, self.w_obj, self.smooth_o) - po(
                obj - self.objdelta[v], self.w_obj, self.smooth_o
            )

        self.found_feasible = False
        cs = suite.calculate_score
        self.score = [0.0] * (n + 1)
        for v in range(1, n + 1):
            self.score[v] = cs(self.hscore[v], self.oscore[v], False)

        self.age = [0] * (n + 1)
        self.step = 0
        self.best_obj: int | None = None
        self.best_values: list[int] | None = None
        self._stamp = [0] * (n + 1)
        self._stamp_token = 0

    # -- incremental maintenance -------------------------------------------

    def _viol_add(self, cid: int) -> None:
        self.viol_pos[cid] = len(self.viol_list)
        self.viol_list.append(cid)

    def _viol_remove(self, cid: int) -> None:
        i = self.viol_pos[cid]
        last = self.viol_list[-1]
        self.viol_list[i] = last
        self.viol_pos[last] = i
        self.viol_list.pop()
        self.viol_pos[cid] = -1

    def apply_flip(self, x: int) -> None:
        """Flip variable x, updating slack/objective caches and the scores of
        x and every variable sharing a constraint with it."""
        values = self.values
        old = values[x]
        values[x] = 1 - old
        ctx = self.ctx
        ph = self.suite.penalty_hard
        slack = self.slack
        hscore = self.hscore
        touched = {x}
        for cid, a, neg in ctx.occ[x]:
            delta = a if (old ^ neg) == 0 else -a
            s_old = slack[cid]
            s_new = s_old + delta
            slack[cid] = s_new
            if s_old < 0 <= s_new:
                self._viol_remove(cid)
            elif s_new < 0 <= s_old:
                self._viol_add(cid)
            w = self.weights[cid]
            sm = self.smooth[cid]
            pen_now = ph(-s_new if s_new < 0 else 0, w, sm)
            row = self.contrib[cid]
            for i, (a_i, v_i, neg_i) in enumerate(ctx.con_terms[cid]):
                d_i = a_i if (values[v_i] ^ neg_i) == 0 else -a_i
                s_after = s_new + d_i
                con = pen_now - ph(-s_after if s_after < 0 else 0, w, sm)
                prev = row[i]
                if con != prev:
                    hscore[v_i] += con - prev
                    row[i] = con
                touched.add(v_i)
        if ctx.obj_occ[x]:
            od = self.objdelta[x]
            self.cached_obj -= od
            self.objdelta[x] = -od
            po = self.suite.penalty_obj
            obj = self.cached_obj
            self.oscore[x] = po(obj, self.w_obj, self.smooth_o) - po(
                obj + od, self.w_obj, self.smooth_o
            )
        self.age[x] = self.step
        self.step += 1
        cs = self.suite.calculate_score
        ff = self.found_feasible
        score = self.score
        oscore = self.oscore
        for v in touched:
            score[v] = cs(hscore[v], oscore[v], ff)

    def refresh_weight_scores(self, changed_cids, obj_changed: bool) -> None:
        """Recompute score contributions after update_weights mutated weights."""
        ctx = self.ctx
        ph = self.suite.penalty_hard
        values = self.values
        touched = set()
        for cid in changed_cids:
            s = self.slack[cid]
            w = self.weights[cid]
            sm = self.smooth[cid]
            pen_now = ph(-s if s < 0 else 0, w, sm)
            row = self.contrib[cid]
            for i, (a_i, v_i, neg_i) in enumerate(ctx.con_terms[cid]):
                d_i = a_i if (values[v_i] ^ neg_i) == 0 else -a_i
                s_after = s + d_i
                con = pen_now - ph(-s_after if s_after < 0 else 0, w, sm)
                prev = row[i]
                if con != prev:
                    self.hscore[v_i] += con - prev
                    row[i] = con
                touched.add(v_i)
        if obj_changed:
            po = self.suite.penalty_obj
            obj = self.cached_obj
            for v in ctx.obj_vars:
                self.oscore[v] = po(obj, self.w_obj, self.smooth_o) - po(
                    obj - self.objdelta[v], self.w_obj, self.smooth_o
                )
                touched.add(v)
        cs = self.suite.calculate_score
        ff = self.found_feasible
        for v in touched:
            self.score[v] = cs(self.hscore[v], self.oscore[v], ff)

    def lift_objective_suppression(self) -> None:
        """First feasible solution seen: objective scores start counting."""
        self.found_feasible = True
        cs = self.suite.calculate_score
        for v in self.ctx.obj_vars:
            self.score[v] = cs(self.hscore[v], self.oscore[v], True)


def apply_flip(state: SearchState, x: int) -> SearchState:
    state.apply_flip(x)
    return state


@dataclass
class FullScores:
    """From-scratch reference values; the oracle the incremental state must match."""

    slack: list[int]
    cached_obj: int
    objdelta: list[int]
    hscore: list[float]
    oscore: list[float]
    score: list[float]


def full_recompute(state: SearchState) -> FullScores:
    """Recompute every slack, objective cache and score from the assignment
    alone, using the suite's penalty definitions and current weights. Makes
    no change to the state."""
    ctx = state.ctx
    values = state.values
    n = ctx.num_vars
    m = len(ctx.con_terms)
    ph = state.suite.penalty_hard
    po = state.suite.penalty_obj
    cs = state.suite.calculate_score

    slack = []
    for cid in range(m):
        s = -ctx.con_b[cid]
        for a, v, neg in ctx.con_terms[cid]:
            s += a * (values[v] ^ neg)
        slack.append(s)

    obj = ctx.obj_const
    objdelta = [0] * (n + 1)
    for v in ctx.obj_vars:
        d = 0
        for e, neg in ctx.obj_occ[v]:
            lit = values[v] ^ neg
            obj += e * lit
            d += e * (2 * lit - 1)
        objdelta[v] = d

    hscore = [0.0] * (n + 1)
    for cid in range(m):
        s = slack[cid]
        w = state.weights[cid]
        sm = state.smooth[cid]
        pen_now = ph(-s if s < 0 else 0, w, sm)
        for a, v, neg in ctx.con_terms[cid]:
            d = a if (values[v] ^ neg) == 0 else -a
            s_after = s + d
            hscore[v] += pen_now - ph(-s_after if s_after < 0 else 0, w, sm)

    oscore = [0.0] * (n + 1)
    for v in ctx.obj_vars:
        oscore[v] = po(obj, state.w_obj, state.smooth_o) - po(
            obj - objdelta[v], state.w_obj, state.smooth_o
        )

    score = [0.0] * (n + 1)
    for v in range(1, n + 1):
        score[v] = cs(hscore[v], oscore[v], state.found_feasible)

    return FullScores(slack, obj, objdelta, hscore, oscore, score)


def _collect_candidates(state: SearchState, full_scan: bool) -> list[int]:
    """Variables eligible for a greedy flip: positive score, drawn from
    violated constraints (objective variables once feasible), or from all
    variables in full-scan fidelity mode."""
    score = state.score
    out = []
    if full_scan:
        for v in range(1, state.ctx.num_vars + 1):
            if score[v] > 0.0:
                out.append(v)
        return out
    if state.viol_list:
        seen = state._stamp
        token = state._stamp_token + 1
        state._stamp_token = token
        con_vars = state.ctx.con_vars
        for cid in state.viol_list:
            for v in con_vars[cid]:
                if seen[v] != token:
                    seen[v] = token
                    if score[v] > 0.0:
                        out.append(v)
    else:
        for v in state.ctx.obj_vars:
            if score[v] > 0.0:
                out.append(v)
    return out


def _validate_var(x, n: int, slot: str):
    if not isinstance(x, int) or isinstance(x, bool) or not (1 <= x <= n):
        raise EngineFault(slot, f"returned {x!r}, expected a variable in 1..{n}")
    return x


def run_search(
    inst: PBOInstance,
    suite: HeuristicSuite,
    cutoff_ms: int,
    seed: int,
    *,
    policy: "_baseline.WeightPolicy | None" = None,
    max_steps: int | None = None,
    full_scan: bool = False,
    greedy_only: bool = False,
    on_flip=None,
) -> SearchOutcome:
    """Run the local search loop on a normalized instance.

    cutoff_ms bounds wall-clock time (checked every iteration against a
    monotonic clock); max_steps optionally bounds iterations for
    deterministic testing. greedy_only disables the weight-update/escape
    branch (diagnostic mode: the loop idles at local optima). Identical
    (instance, suite, seed, step budget) reproduces the identical flip
    sequence.
    """
    if cutoff_ms <= 0:
        raise ValueError("cutoff_ms must be positive")
    if inst.num_vars < 1:
        raise EngineFault("engine", "degenerate instance with no variables")
    ctx = SearchContext(inst)
    rng = random.Random(seed)
    policy = policy if policy is not None else _baseline.WeightPolicy()

    t0 = time.monotonic()
    deadline = t0 + cutoff_ms / 1000.0

    values = suite.initialize_assignment(inst, rng)
    if (
        not isinstance(values, list)
        or len(values) != inst.num_vars + 1
        or any(v not in (0, 1) for v in values[1:])
    ):
        raise EngineFault(
            "initialize_assignment",
            f"must return a 0/1 list of length {inst.num_vars + 1} (slot 0 unused)",
        )
    state = SearchState(ctx, suite, policy, rng, values)

    iterations = 0
    if time.monotonic() < deadline:
        while True:
            if not state.viol_list and (
                state.best_obj is None or state.cached_obj < state.best_obj
            ):
                state.best_obj = state.cached_obj
                state.best_values = list(state.values)
                if not state.found_feasible:
                    state.lift_objective_suppression()
            if max_steps is not None and iterations >= max_steps:
                break
            if time.monotonic() >= deadline:
                break
            iterations += 1
            cands = _collect_candidates(state, full_scan)
            if cands:
                x = _validate_var(
                    suite.pick_best_variable(cands, state), inst.num_vars, "pick_best_variable"
                )
            elif greedy_only:
                continue
            else:
                changed = suite.update_weights(inst, state, policy, rng)
                try:
                    changed_cids, obj_changed = changed
                except (TypeError, ValueError):
                    raise EngineFault(
                        "update_weights",
                        f"must return (changed constraint ids, obj weight changed), got {changed!r}",
                    ) from None
                state.refresh_weight_scores(changed_cids, obj_changed)
                x = _validate_var(
                    suite.pick_escape_variable(inst, state, policy, rng),
                    inst.num_vars,
                    "pick_escape_variable",
                )
            state.apply_flip(x)
            if on_flip is not None:
                on_flip(x)

    elapsed_ms = int((time.monotonic() - t0) * 1000)
    if state.best_obj is not None:
        return SearchOutcome("solution_found", state.best_obj, state.best_values,
                             state.step, elapsed_ms)
    return SearchOutcome("no_solution", None, None, state.step, elapsed_ms)
