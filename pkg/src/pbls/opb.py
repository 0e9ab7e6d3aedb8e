"""Reader and writer for the pseudo-Boolean competition OPB text format.

Accepted grammar (whitespace-separated tokens, '\\n' or '\\r\\n' line ends):

    document   := { comment | objective | constraint }
    comment    := '*' any-chars EOL
    objective  := 'min:' { term } ';'
    constraint := { term } op integer ';'
    term       := coefficient variable          (coefficient: [+-]?digits)
    variable   := 'x' digits | '~x' digits
    op         := '>=' | '<=' | '>' | '<' | '='

At most one objective line, and it must precede all constraints. The header
comment ``* #variable= N #constraint= M`` is honored for pre-sizing when
present; a count mismatch is a warning, not an error. Operators outside the
competition pair (>=, =) are accepted and flagged in the report warnings.

Serialization extension: normalized objectives can carry a constant term the
grammar cannot express; a nonzero constant is emitted as the comment
``* #objective-constant= D``, which parse_instance honors on the way back in,
making parse(serialize(F)) structurally lossless.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import IO

from .model import (
    Literal,
    Objective,
    PBConstraint,
    PBOInstance,
    RawConstraint,
    _merge_terms,
    normalize_constraint,
)

_HEADER_RE = re.compile(r"\*\s*#variable=\s*(\d+)\s+#constraint=\s*(\d+)")
_OBJ_CONST_RE = re.compile(r"\*\s*#objective-constant=\s*(-?\d+)\s*$")
_COEF_RE = re.compile(r"^[+-]?\d+$")
_VAR_RE = re.compile(r"^(~?)x(\d+)$")

_COMPETITION_OPS = (">=", "=")


class OpbParseError(ValueError):
    """Malformed OPB input; carries the offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


@dataclass
class ParseReport:
    """What the parser saw: declared sizes, counts, dropped tautologies, warnings."""

    num_vars_declared: int | None = None
    num_constraints_declared: int | None = None
    num_constraints_read: int = 0
    tautologies_dropped: int = 0
    warnings: list[str] = field(default_factory=list)


def _tokenize(line: str) -> list[str]:
    # ';' may be glued to the previous token ("+1 x1 >= 2;").
    out: list[str] = []
    for tok in line.split():
        if tok != ";" and tok.endswith(";"):
            out.append(tok[:-1])
            out.append(";")
        else:
            out.append(tok)
    return out


def _parse_statement(tokens: list[tuple[str, int]], start_line: int, report: ParseReport):
    """Classify one ';'-terminated statement into ('min', terms) or ('con', raw)."""
    toks = [t for t, _ in tokens]
    if toks[0] == "min:":
        terms = _parse_terms(tokens[1:], start_line)
        return "min", terms
    if toks[0] == "max:":
        raise OpbParseError(start_line, "maximization objectives are not supported")
    op_positions = [i for i, t in enumerate(toks) if t in ("=", ">", ">=", "<", "<=")]
    if not op_positions:
        raise OpbParseError(start_line, "constraint is missing a relational operator")
    if len(op_positions) > 1:
        raise OpbParseError(tokens[op_positions[1]][1], "multiple relational operators")
    pos = op_positions[0]
    op = toks[pos]
    if op not in _COMPETITION_OPS:
        report.warnings.append(
            f"line {tokens[pos][1]}: operator {op!r} outside the competition subset; normalized"
        )
    rhs_toks = tokens[pos + 1 :]
    if len(rhs_toks) != 1:
        raise OpbParseError(
            tokens[pos][1], f"expected one integer after {op!r}, got {len(rhs_toks)} tokens"
        )
    rhs_tok, rhs_line = rhs_toks[0]
    if not _COEF_RE.match(rhs_tok):
        raise OpbParseError(rhs_line, f"threshold {rhs_tok!r} is not an integer")
    terms = _parse_terms(tokens[:pos], start_line)
    return "con", RawConstraint(terms, op, int(rhs_tok))


def _parse_terms(tokens: list[tuple[str, int]], start_line: int) -> list[tuple[int, Literal]]:
    if len(tokens) % 2 != 0:
        line = tokens[-1][1] if tokens else start_line
        raise OpbParseError(line, "terms must come in coefficient/variable pairs")
    terms: list[tuple[int, Literal]] = []
    for i in range(0, len(tokens), 2):
        coef_tok, coef_line = tokens[i]
        var_tok, var_line = tokens[i + 1]
        if not _COEF_RE.match(coef_tok):
            raise OpbParseError(coef_line, f"coefficient {coef_tok!r} is not an integer")
        m = _VAR_RE.match(var_tok)
        if not m:
            raise OpbParseError(var_line, f"expected a variable like x3 or ~x3, got {var_tok!r}")
        index = int(m.group(2))
        if index < 1:
            raise OpbParseError(var_line, f"variable index must be >= 1, got {var_tok!r}")
        terms.append((int(coef_tok), Literal(index, negated=m.group(1) == "~")))
    return terms


def parse_instance(source: str | IO[str], name: str = "") -> tuple[PBOInstance, ParseReport]:
    """Parse an OPB document into a normalized instance plus a parse report.

    Raises OpbParseError (with a line number) on malformed input and
    ArithmeticRangeError when normalization overflows 64-bit integers.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    report = ParseReport()
    objective_terms: list[tuple[int, Literal]] | None = None
    objective_constant = 0
    raws: list[tuple[RawConstraint, int]] = []
    pending: list[tuple[str, int]] = []
    pending_start = 0
    saw_constraint = False

    for line_no, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        stripped = line.lstrip()
        if not pending and not stripped:
            continue
        if stripped.startswith("*"):
            m = _HEADER_RE.match(stripped)
            if m:
                report.num_vars_declared = int(m.group(1))
                report.num_constraints_declared = int(m.group(2))
            m = _OBJ_CONST_RE.match(stripped)
            if m:
                objective_constant += int(m.group(1))
            continue
        for tok in _tokenize(line):
            if not pending:
                pending_start = line_no
            if tok != ";":
                pending.append((tok, line_no))
                continue
            if not pending:
                continue  # stray ';' between statements
            kind, payload = _parse_statement(pending, pending_start, report)
            if kind == "min":
                if objective_terms is not None:
                    raise OpbParseError(pending_start, "multiple objective lines")
                if saw_constraint:
                    raise OpbParseError(pending_start, "objective must precede all constraints")
                objective_terms = payload
            else:
                saw_constraint = True
                raws.append((payload, pending_start))
            pending = []

    if pending:
        raise OpbParseError(pending_start, "missing ';' terminator at end of input")

    constraints: list[PBConstraint] = []
    for raw, line_no in raws:
        normalized = normalize_constraint(raw, first_cid=len(constraints))
        expected = 2 if raw.op == "=" else 1
        report.tautologies_dropped += expected - len(normalized)
        constraints.extend(normalized)
    report.num_constraints_read = len(raws)

    max_var = 0
    for c in constraints:
        for _, lit in c.terms:
            max_var = max(max_var, lit.var)
    obj = Objective()
    if objective_terms is not None or objective_constant:
        coeffs, absorbed = _merge_terms(objective_terms or [])
        terms: list[tuple[int, Literal]] = []
        d = absorbed + objective_constant
        for var, k in coeffs.items():
            max_var = max(max_var, var)
            if k > 0:
                terms.append((k, Literal(var)))
            elif k < 0:
                terms.append((-k, Literal(var, negated=True)))
                d += k
        obj = Objective(tuple(terms), d)

    num_vars = max_var
    if report.num_vars_declared is not None:
        if report.num_vars_declared < max_var:
            report.warnings.append(
                f"header declares {report.num_vars_declared} variables but x{max_var} is used"
            )
        num_vars = max(report.num_vars_declared, max_var)
    if (
        report.num_constraints_declared is not None
        and report.num_constraints_declared != report.num_constraints_read
    ):
        report.warnings.append(
            f"header declares {report.num_constraints_declared} constraints, "
            f"read {report.num_constraints_read}"
        )

    return PBOInstance(num_vars, tuple(constraints), obj, name=name), report


def serialize_instance(inst: PBOInstance) -> str:
    """Render a normalized instance as OPB text; parse(serialize(F)) is lossless."""
    out = [f"* #variable= {inst.num_vars} #constraint= {len(inst.constraints)}"]
    if inst.objective.constant:
        out.append(f"* #objective-constant= {inst.objective.constant}")
    obj_terms = " ".join(f"+{e} {lit}" for e, lit in inst.objective.terms)
    out.append(f"min: {obj_terms} ;" if obj_terms else "min: ;")
    for c in inst.constraints:
        body = " ".join(f"+{a} {lit}" for a, lit in c.terms)
        out.append(f"{body} >= {c.threshold} ;" if body else f">= {c.threshold} ;")
    return "\n".join(out) + "\n"
