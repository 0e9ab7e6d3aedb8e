"""Core types for pseudo-Boolean optimization instances.

A PB constraint is a linear inequality over Boolean literals. Everything in
this package works on the normalized form

    sum_j a_j * l_j >= b        with a_j >= 1 and b >= 0,

to which every raw constraint (any of =, >, >=, <, <= with arbitrary integer
coefficients) can be rewritten. The objective is a linear expression
sum_j e_j * l_j + d with e_j >= 1 to be minimized over feasible assignments.

Assignments are stored as 0/1 integer lists of length ``num_vars + 1``;
index 0 is unused so that variable ``i`` lives at position ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

INT64_MAX = 2**63 - 1

OPERATORS = ("=", ">", ">=", "<", "<=")


class ArithmeticRangeError(ValueError):
    """A coefficient or threshold left the signed 64-bit range after rewriting."""


@dataclass(frozen=True)
class Literal:
    """A Boolean variable (1-based index) or its negation."""

    var: int
    negated: bool = False

    def value(self, values: Sequence[int]) -> int:
        v = values[self.var]
        return 1 - v if self.negated else v

    def __str__(self) -> str:
        return f"~x{self.var}" if self.negated else f"x{self.var}"


@dataclass(frozen=True)
class PBConstraint:
    """A normalized constraint: sum of (coefficient, literal) terms >= threshold.

    Coefficients are >= 1, the threshold is >= 1 (threshold <= 0 would be a
    tautology, which normalization drops), and no two terms share a variable.
    An empty term list with a positive threshold is an unsatisfiable marker.
    """

    terms: tuple[tuple[int, Literal], ...]
    threshold: int
    cid: int = 0

    def lhs(self, values: Sequence[int]) -> int:
        return sum(a * lit.value(values) for a, lit in self.terms)

    def __str__(self) -> str:
        body = " ".join(f"+{a} {lit}" for a, lit in self.terms)
        return f"{body} >= {self.threshold}".strip()


@dataclass(frozen=True)
class Objective:
    """Minimization objective: sum of (coefficient, literal) terms plus a constant."""

    terms: tuple[tuple[int, Literal], ...] = ()
    constant: int = 0

    def value(self, values: Sequence[int]) -> int:
        return sum(e * lit.value(values) for e, lit in self.terms) + self.constant


@dataclass(eq=False)
class PBOInstance:
    """A conjunction of normalized constraints plus an objective.

    Instances are immutable after construction and safe to share between
    concurrent search runs. Identity semantics (eq=False); use
    :func:`same_structure` for structural comparison.
    """

    num_vars: int
    constraints: tuple[PBConstraint, ...]
    objective: Objective = field(default_factory=Objective)
    name: str = ""

    def __post_init__(self) -> None:
        self.constraints = tuple(self.constraints)
        for i, c in enumerate(self.constraints):
            if c.cid != i:
                raise ValueError(f"constraint ids must be dense: got {c.cid} at {i}")
            for _, lit in c.terms:
                if not (1 <= lit.var <= self.num_vars):
                    raise ValueError(f"literal x{lit.var} out of range 1..{self.num_vars}")
        for _, lit in self.objective.terms:
            if not (1 <= lit.var <= self.num_vars):
                raise ValueError(f"objective literal x{lit.var} out of range")


@dataclass
class RawConstraint:
    """A constraint as read from input, before normalization.

    Coefficients may be negative, terms may repeat variables, and any of the
    five relational operators is allowed.
    """

    terms: list[tuple[int, Literal]]
    op: str
    threshold: int


def _check_range(value: int, what: str) -> int:
    if abs(value) > INT64_MAX:
        raise ArithmeticRangeError(f"{what} {value} exceeds the signed 64-bit range")
    return value


def _merge_terms(terms: Iterable[tuple[int, Literal]]) -> tuple[dict[int, int], int]:
    """Fold terms into per-variable signed coefficients plus an absorbed constant.

    a * ~x contributes (a, -a*x); duplicate variables sum. Insertion order of
    first appearance is preserved via the dict.
    """
    coeffs: dict[int, int] = {}
    constant = 0
    for a, lit in terms:
        if a == 0:
            continue
        if lit.var < 1:
            raise ValueError(f"variable index must be >= 1, got {lit.var}")
        if lit.negated:
            constant += a
            coeffs[lit.var] = coeffs.get(lit.var, 0) - a
        else:
            coeffs[lit.var] = coeffs.get(lit.var, 0) + a
    return coeffs, constant


def normalize_constraint(raw: RawConstraint, first_cid: int = 0) -> list[PBConstraint]:
    """Rewrite a raw constraint into 0, 1 or 2 normalized >= constraints.

    '=' splits into a >= pair; strict operators shift the integer threshold;
    negative coefficients flip literal polarity. Sides whose threshold ends
    up <= 0 are tautologies and are dropped (hence "0 or 1" for them).
    """
    if raw.op not in OPERATORS:
        raise ValueError(f"unknown relational operator {raw.op!r}")
    coeffs, absorbed = _merge_terms(raw.terms)
    rhs = raw.threshold - absorbed

    if raw.op == ">=":
        sides = [(1, rhs)]
    elif raw.op == ">":
        sides = [(1, rhs + 1)]
    elif raw.op == "<=":
        sides = [(-1, -rhs)]
    elif raw.op == "<":
        sides = [(-1, 1 - rhs)]
    else:  # '='
        sides = [(1, rhs), (-1, -rhs)]

    out: list[PBConstraint] = []
    for sign, b in sides:
        terms: list[tuple[int, Literal]] = []
        for var, k in coeffs.items():
            k *= sign
            if k == 0:
                continue
            if k > 0:
                terms.append((_check_range(k, "coefficient"), Literal(var)))
            else:
                terms.append((_check_range(-k, "coefficient"), Literal(var, negated=True)))
                b += -k
        if b <= 0:
            continue  # tautology: non-negative LHS always >= b
        _check_range(b, "threshold")
        out.append(PBConstraint(tuple(terms), b, first_cid + len(out)))
    return out


def violation(c: PBConstraint, alpha: "Assignment | Sequence[int]") -> int:
    """Violation degree: max(0, threshold - LHS); zero iff satisfied."""
    values = alpha.values if isinstance(alpha, Assignment) else alpha
    return max(0, c.threshold - c.lhs(values))


def objective_value(o: Objective, alpha: "Assignment | Sequence[int]") -> int:
    values = alpha.values if isinstance(alpha, Assignment) else alpha
    return o.value(values)


def is_feasible(inst: PBOInstance, alpha: "Assignment | Sequence[int]") -> bool:
    values = alpha.values if isinstance(alpha, Assignment) else alpha
    return all(c.lhs(values) >= c.threshold for c in inst.constraints)


def build_occurrences(inst: PBOInstance) -> list[list[tuple[int, int, int]]]:
    """Per-variable occurrence lists: var -> [(constraint id, coefficient, negated)]."""
    occ: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.num_vars + 1)]
    for c in inst.constraints:
        for a, lit in c.terms:
            occ[lit.var].append((c.cid, a, int(lit.negated)))
    return occ


class Assignment:
    """A complete 0/1 valuation with cached objective and per-constraint slack.

    slack[c] = LHS(c) - threshold(c); the constraint is satisfied iff
    slack >= 0, and viol(c) = max(0, -slack[c]). ``flip`` maintains both
    caches incrementally. Mutable: confine to one search run at a time.
    """

    def __init__(self, inst: PBOInstance, values: Sequence[int]):
        if len(values) != inst.num_vars + 1:
            raise ValueError(
                f"expected {inst.num_vars + 1} values (slot 0 unused), got {len(values)}"
            )
        self.inst = inst
        self.values = list(values)
        self._occ = build_occurrences(inst)
        self._obj_occ: list[list[tuple[int, int]]] = [[] for _ in range(inst.num_vars + 1)]
        for e, lit in inst.objective.terms:
            self._obj_occ[lit.var].append((e, int(lit.negated)))
        self.slack = [c.lhs(self.values) - c.threshold for c in inst.constraints]
        self.cached_obj = inst.objective.value(self.values)
        self.num_violated = sum(1 for s in self.slack if s < 0)

    @classmethod
    def random(cls, inst: PBOInstance, rng) -> "Assignment":
        return cls(inst, [0] + [rng.randrange(2) for _ in range(inst.num_vars)])

    def flip(self, x: int) -> None:
        old = self.values[x]
        self.values[x] = 1 - old
        for cid, a, neg in self._occ[x]:
            delta = a if (old ^ neg) == 0 else -a
            s_old = self.slack[cid]
            s_new = s_old + delta
            self.slack[cid] = s_new
            if s_old < 0 <= s_new:
                self.num_violated -= 1
            elif s_new < 0 <= s_old:
                self.num_violated += 1
        for e, neg in self._obj_occ[x]:
            self.cached_obj += -e if (old ^ neg) == 1 else e

    def violation(self, cid: int) -> int:
        return max(0, -self.slack[cid])

    def is_feasible(self) -> bool:
        return self.num_violated == 0


def same_structure(a: PBOInstance, b: PBOInstance) -> bool:
    """Structural equality: variable count, constraint sequence, objective.

    Instance names are excluded (they identify the source, not the content).
    """
    if a.num_vars != b.num_vars or len(a.constraints) != len(b.constraints):
        return False
    for ca, cb in zip(a.constraints, b.constraints):
        if ca.terms != cb.terms or ca.threshold != cb.threshold:
            return False
    return (
        a.objective.terms == b.objective.terms
        and a.objective.constant == b.objective.constant
    )
