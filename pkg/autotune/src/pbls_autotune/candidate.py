"""Candidate construction: snapshot the working tree, splice one slot,
compile-check, and smoke-run the patched solver."""

from __future__ import annotations

import os
import py_compile
import shutil
import subprocess
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path

from .slots import SlotError, diff_text, find_region, is_trivial, replace_region, validate_slot_body

SMOKE_OPB = "min: ;\n+1 x1 >= 1 ;\n"
SMOKE_TIMEOUT_S = 60


@dataclass
class CandidateVersion:
    candidate_id: str
    slot: str
    body: str
    tree_dir: str = ""
    diff_summary: str = ""
    build_status: str = "rejected"  # "ok" | "compile_error" | "rejected"
    triviality_flag: bool = False
    build_log: str = ""
    rejected_reason: str | None = None
    eval_records: list = field(default_factory=list)

    @property
    def evaluable(self) -> bool:
        return self.build_status == "ok" and not self.triviality_flag


def solver_argv(tree_dir: str, package: str) -> list[str]:
    return [sys.executable, "-m", f"{package}.cli"]


def solver_env(tree_dir: str) -> dict[str, str]:
    """PYTHONPATH pointing at the candidate tree first, so the patched
    package shadows any installed copy in child processes."""
    existing = os.environ.get("PYTHONPATH", "")
    return {"PYTHONPATH": tree_dir + (os.pathsep + existing if existing else "")}


def build_candidate(
    candidate_id: str,
    working_src: str | Path,
    slot: str,
    body: str,
    dest: str | Path,
    *,
    package: str = "pbls",
    heuristics_relpath: str = "pbls/heuristics.py",
) -> CandidateVersion:
    """Snapshot working_src into dest/tree with `body` spliced into `slot`.

    Out-of-scope structures are rejected without building; trivial edits are
    flagged and never evaluated; the rest is compile-checked and smoke-run
    (a crash on a one-variable probe instance counts as a build failure).
    """
    body = body.strip("\n")
    cand = CandidateVersion(candidate_id, slot, body)
    working_src = Path(working_src)
    dest = Path(dest)

    baseline_source = (working_src / heuristics_relpath).read_text(encoding="utf-8")
    _, _, old_body = find_region(baseline_source, slot)

    try:
        validate_slot_body(body, slot)
    except SlotError as exc:
        cand.rejected_reason = str(exc)
        cand.build_log = str(exc)
        return cand

    cand.triviality_flag = is_trivial(old_body, body, slot)

    tree = dest / "tree"
    if tree.exists():
        shutil.rmtree(tree)
    dest.mkdir(parents=True, exist_ok=True)
    shutil.copytree(working_src / package, tree / package,
                    ignore=shutil.ignore_patterns("__pycache__"))
    patched_source = replace_region(baseline_source, slot, body)
    patched_path = tree / heuristics_relpath
    patched_path.write_text(patched_source, encoding="utf-8")
    cand.tree_dir = str(tree)
    cand.diff_summary = diff_text(baseline_source, patched_source, heuristics_relpath)

    try:
        py_compile.compile(str(patched_path), doraise=True)
    except py_compile.PyCompileError as exc:
        cand.build_status = "compile_error"
        cand.build_log = str(exc)
        return cand
    except Exception:  # noqa: BLE001
        cand.build_status = "compile_error"
        cand.build_log = traceback.format_exc()
        return cand

    if cand.triviality_flag:
        cand.build_status = "ok"
        cand.build_log = "compiled; trivial modification, evaluation skipped"
        return cand

    smoke = dest / "smoke.opb"
    smoke.write_text(SMOKE_OPB, encoding="utf-8")
    env = os.environ.copy()
    env.update(solver_env(str(tree)))
    proc = None
    try:
        proc = subprocess.run(
            solver_argv(str(tree), package)
            + ["--instance", str(smoke), "--cutoff-ms", "5000",
               "--seed", "1", "--max-steps", "50", "--output", "json"],
            capture_output=True, text=True, timeout=SMOKE_TIMEOUT_S, env=env,
        )
    except subprocess.TimeoutExpired:
        cand.build_status = "compile_error"
        cand.build_log = "smoke run timed out"
        return cand
    if proc.returncode != 0:
        cand.build_status = "compile_error"
        cand.build_log = (proc.stderr or proc.stdout).strip()
        return cand

    cand.build_status = "ok"
    cand.build_log = "compiled and smoke-ran cleanly"
    return cand
