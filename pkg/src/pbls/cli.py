"""Command-line solver front end.

Implements the harness invocation contract: given --instance/--cutoff-ms/
--seed/--output json, print a single JSON line {status, obj?, steps,
elapsed_ms, ...} and exit 0 whether or not a solution was found. Exit 2 on
bad flags, unreadable files or malformed OPB; exit 1 on an internal engine
fault.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .engine import EngineFault, build_suite, run_search
from .heuristics import WeightPolicy
from .model import ArithmeticRangeError
from .opb import OpbParseError, parse_instance


@dataclass
class SolverConfig:
    instance_path: str
    cutoff_ms: int
    seed: int
    suite_spec: dict[str, str] = field(default_factory=dict)
    policy: WeightPolicy = field(default_factory=WeightPolicy)
    output_mode: str = "json"
    max_steps: int | None = None
    print_model: bool = False
    full_scan: bool = False


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbls",
        description="Stochastic local search solver for pseudo-Boolean optimization (OPB input).",
    )
    parser.add_argument("--instance", required=True, help="path to an OPB file")
    parser.add_argument("--cutoff-ms", type=int, default=60000,
                        help="wall-clock budget in milliseconds (default 60000)")
    parser.add_argument("--seed", type=int, default=1, help="RNG seed (default 1)")
    parser.add_argument("--slot", action="append", default=[], metavar="NAME=IMPL",
                        help="override a heuristic slot, e.g. "
                             "update_weights=baseline.update_weights.v0 (repeatable)")
    parser.add_argument("--hard-increment", type=int, default=1)
    parser.add_argument("--obj-increment", type=int, default=1)
    parser.add_argument("--obj-weight-cap", type=int, default=None)
    parser.add_argument("--sp", type=float, default=0.0,
                        help="probability that a weight update smooths instead of bumping")
    parser.add_argument("--bms", type=int, default=50,
                        help="sample size for escape-variable selection")
    parser.add_argument("--max-steps", type=int, default=None,
                        help="optional deterministic step budget")
    parser.add_argument("--output", choices=("json", "human"), default="json")
    parser.add_argument("--print-model", action="store_true",
                        help="include the best assignment as a 0/1 string")
    parser.add_argument("--full-scan", action="store_true",
                        help="scan all variables for flip candidates each step")
    return parser


def _parse_config(argv) -> SolverConfig:
    args = _build_parser().parse_args(argv)
    suite_spec = {}
    for item in args.slot:
        name, sep, impl = item.partition("=")
        if not sep or not name or not impl:
            raise ValueError(f"--slot expects NAME=IMPL, got {item!r}")
        suite_spec[name] = impl
    if args.sp < 0.0 or args.sp > 1.0:
        raise ValueError("--sp must be in [0, 1]")
    policy = WeightPolicy(
        hard_increment=args.hard_increment,
        obj_increment=args.obj_increment,
        obj_weight_cap=args.obj_weight_cap,
        sp=args.sp,
        bms=args.bms,
    )
    return SolverConfig(
        instance_path=args.instance,
        cutoff_ms=args.cutoff_ms,
        seed=args.seed,
        suite_spec=suite_spec,
        policy=policy,
        output_mode=args.output,
        max_steps=args.max_steps,
        print_model=args.print_model,
        full_scan=args.full_scan,
    )


def main(argv=None) -> int:
    try:
        config = _parse_config(argv)
        suite = build_suite(config.suite_spec)
        text = Path(config.instance_path).read_text(encoding="utf-8")
        inst, report = parse_instance(text, name=Path(config.instance_path).name)
    except (OSError, OpbParseError, ArithmeticRangeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        outcome = run_search(
            inst,
            suite,
            config.cutoff_ms,
            config.seed,
            policy=config.policy,
            max_steps=config.max_steps,
            full_scan=config.full_scan,
        )
    except EngineFault as exc:
        print(f"engine fault: {exc}", file=sys.stderr)
        return 1

    feasible = outcome.status == "solution_found"
    if config.output_mode == "json":
        payload: dict = {"status": "feasible" if feasible else "infeasible"}
        if feasible:
            payload["obj"] = outcome.best_obj
        payload["steps"] = outcome.steps_executed
        payload["elapsed_ms"] = outcome.elapsed_ms
        payload["seed"] = config.seed
        payload["suite"] = suite.slot_versions()
        if report.warnings:
            payload["parse_warnings"] = report.warnings
        if config.print_model and feasible:
            payload["model"] = "".join(str(v) for v in outcome.best_assignment[1:])
        print(json.dumps(payload))
    else:
        print(f"instance: {inst.name} ({inst.num_vars} vars, {len(inst.constraints)} constraints)")
        for warning in report.warnings:
            print(f"warning: {warning}")
        if feasible:
            print(f"feasible, objective {outcome.best_obj}")
            if config.print_model:
                print("model: " + "".join(str(v) for v in outcome.best_assignment[1:]))
        else:
            print("no solution found within budget")
        print(f"steps {outcome.steps_executed}, elapsed {outcome.elapsed_ms} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
