"""pbls: stochastic local search for pseudo-Boolean optimization.

A structured solver whose seven heuristic decisions (initialization, the two
penalty functions, score combination, greedy pick, weight update, escape
pick) are independently replaceable slots, plus an OPB parser and a
competition-metric benchmark harness.
"""

from .model import (
    ArithmeticRangeError,
    Assignment,
    Literal,
    Objective,
    PBConstraint,
    PBOInstance,
    RawConstraint,
    is_feasible,
    normalize_constraint,
    objective_value,
    same_structure,
    violation,
)
from .opb import OpbParseError, ParseReport, parse_instance, serialize_instance
from .engine import (
    EngineFault,
    HeuristicSuite,
    SearchOutcome,
    apply_flip,
    build_suite,
    full_recompute,
    run_search,
)
from .heuristics import SLOT_NAMES, SmoothingTable, WeightPolicy, smoothing_table
from .bench import (
    DatasetMetrics,
    RunRecord,
    VersionVerdict,
    compute_dataset_metrics,
    compute_instance_score,
    run_batch,
    select_best_version,
)

__version__ = "0.1.0"
