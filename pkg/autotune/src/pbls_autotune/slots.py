"""Slot-region surgery on the solver source: locate, validate, splice, diff.

The solver keeps each heuristic between '# SLOT-BEGIN <name>' and
'# SLOT-END <name>' sentinel comments. Edits may replace only a region body;
everything else must stay byte-identical. Triviality is judged on a
canonical form: docstrings and comments stripped, every locally bound name
renamed to a positional placeholder, metadata attribute assignments dropped.
Pure renames and comment edits are trivial; constant changes are not.
"""

from __future__ import annotations

import ast
import difflib

BEGIN = "# SLOT-BEGIN {name}"
END = "# SLOT-END {name}"


class SlotError(ValueError):
    pass


def find_region(source: str, slot: str) -> tuple[int, int, str]:
    """Locate a slot region; returns (begin line index, end line index, body)."""
    begin_mark = BEGIN.format(name=slot)
    end_mark = END.format(name=slot)
    lines = source.splitlines()
    begins = [i for i, ln in enumerate(lines) if ln.strip() == begin_mark]
    ends = [i for i, ln in enumerate(lines) if ln.strip() == end_mark]
    if len(begins) != 1 or len(ends) != 1:
        raise SlotError(f"expected exactly one region for slot {slot!r}")
    begin, end = begins[0], ends[0]
    if end <= begin:
        raise SlotError(f"malformed region for slot {slot!r}")
    body = "\n".join(lines[begin + 1 : end]).strip("\n")
    return begin, end, body


def replace_region(source: str, slot: str, new_body: str) -> str:
    begin, end, _ = find_region(source, slot)
    lines = source.splitlines()
    spliced = (
        lines[: begin + 1]
        + [new_body.strip("\n")]
        + lines[end:]
    )
    out = "\n".join(spliced)
    if source.endswith("\n") and not out.endswith("\n"):
        out += "\n"
    return out


def extract_code_block(response: str) -> str:
    """Pull the first fenced code block out of a chat response; a response
    with no fence is taken verbatim."""
    lines = response.splitlines()
    starts = [i for i, ln in enumerate(lines) if ln.strip().startswith("```")]
    if len(starts) >= 2:
        return "\n".join(lines[starts[0] + 1 : starts[1]]).strip("\n")
    return response.strip("\n")


def _is_metadata_assign(node: ast.stmt, slot: str) -> bool:
    return (
        isinstance(node, ast.Assign)
        and len(node.targets) == 1
        and isinstance(node.targets[0], ast.Attribute)
        and isinstance(node.targets[0].value, ast.Name)
        and node.targets[0].value.id == slot
    )


def validate_slot_body(body: str, slot: str) -> None:
    """Reject structures that would edit beyond the slot: extra top-level
    definitions, statements, or embedded region markers. Raises SlotError
    with an 'out-of-scope edit' reason. Syntax errors are not handled here;
    they surface as build failures."""
    if "# SLOT-BEGIN" in body or "# SLOT-END" in body:
        raise SlotError("out-of-scope edit: region markers inside the replacement")
    try:
        tree = ast.parse(body)
    except SyntaxError:
        return  # the compile step reports this with a proper log
    defs = [n for n in tree.body if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))]
    if len(defs) != 1 or defs[0].name != slot:
        raise SlotError(
            f"out-of-scope edit: region must define exactly one function named {slot!r}"
        )
    for node in tree.body:
        if node is defs[0] or _is_metadata_assign(node, slot):
            continue
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            continue
        if isinstance(node, ast.Expr) and isinstance(node.value, ast.Constant) and isinstance(
            node.value.value, str
        ):
            continue
        raise SlotError(
            f"out-of-scope edit: unexpected top-level statement {type(node).__name__}"
        )


class _BindingCollector(ast.NodeVisitor):
    """Names bound anywhere in the body (args, assignments, loop and
    comprehension targets, nested def names) minus global/nonlocal escapes."""

    def __init__(self):
        self.bound: set[str] = set()
        self.escaped: set[str] = set()

    def visit_Name(self, node: ast.Name) -> None:
        if isinstance(node.ctx, (ast.Store, ast.Del)):
            self.bound.add(node.id)
        self.generic_visit(node)

    def visit_arg(self, node: ast.arg) -> None:
        self.bound.add(node.arg)
        self.generic_visit(node)

    def visit_FunctionDef(self, node) -> None:
        self.bound.add(node.name)
        self.generic_visit(node)

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_Global(self, node: ast.Global) -> None:
        self.escaped.update(node.names)

    def visit_Nonlocal(self, node: ast.Nonlocal) -> None:
        self.escaped.update(node.names)


def _ordered_identifiers(node: ast.AST):
    """Name/arg identifiers in depth-first source order."""
    if isinstance(node, ast.Name):
        yield node.id
    elif isinstance(node, ast.arg):
        yield node.arg
    for child in ast.iter_child_nodes(node):
        yield from _ordered_identifiers(child)


class _Renamer(ast.NodeTransformer):
    def __init__(self, mapping: dict[str, str]):
        self.mapping = mapping

    def visit_Name(self, node: ast.Name):
        self.generic_visit(node)
        if node.id in self.mapping:
            node.id = self.mapping[node.id]
        return node

    def visit_arg(self, node: ast.arg):
        self.generic_visit(node)
        if node.arg in self.mapping:
            node.arg = self.mapping[node.arg]
        return node


def _strip_docstrings(tree: ast.AST) -> None:
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Module, ast.ClassDef)):
            body = node.body
            if (
                body
                and isinstance(body[0], ast.Expr)
                and isinstance(body[0].value, ast.Constant)
                and isinstance(body[0].value.value, str)
            ):
                node.body = body[1:] or [ast.Pass()]


def canonical_form(body: str, slot: str) -> str:
    """Behavioral fingerprint of a slot body (see module docstring)."""
    tree = ast.parse(body)
    tree.body = [n for n in tree.body if not _is_metadata_assign(n, slot)]
    _strip_docstrings(tree)
    collector = _BindingCollector()
    collector.visit(tree)
    renameable = collector.bound - collector.escaped - {slot}
    mapping: dict[str, str] = {}
    for name in _ordered_identifiers(tree):
        if name in renameable and name not in mapping:
            mapping[name] = f"v{len(mapping)}"
    tree = _Renamer(mapping).visit(tree)
    return ast.dump(tree, annotate_fields=False, include_attributes=False)


def is_trivial(old_body: str, new_body: str, slot: str) -> bool:
    """True when the edit is only renames, comments, docstrings, or version
    metadata; such candidates are excluded from evaluation."""
    try:
        return canonical_form(old_body, slot) == canonical_form(new_body, slot)
    except SyntaxError:
        return False


def diff_text(old_source: str, new_source: str, path: str) -> str:
    return "".join(
        difflib.unified_diff(
            old_source.splitlines(keepends=True),
            new_source.splitlines(keepends=True),
            fromfile=f"a/{path}",
            tofile=f"b/{path}",
        )
    )
