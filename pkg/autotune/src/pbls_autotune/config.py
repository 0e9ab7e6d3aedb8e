"""Campaign configuration: what to optimize, where, with which backend."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict
from pathlib import Path

SLOT_NAMES = (
    "initialize_assignment",
    "penalty_hard",
    "penalty_obj",
    "calculate_score",
    "pick_best_variable",
    "update_weights",
    "pick_escape_variable",
)

# Weight update first, then score combination, then the remaining slots in
# their declaration order: dependent heuristics adapt to freshly propagated
# upstream changes.
DEFAULT_SLOT_ORDER = (
    "update_weights",
    "calculate_score",
    "initialize_assignment",
    "penalty_hard",
    "penalty_obj",
    "pick_best_variable",
    "pick_escape_variable",
)


class ConfigError(ValueError):
    pass


@dataclass
class OrchestratorConfig:
    training_instances: list[str]
    campaign_dir: str
    solver_source: str  # directory containing the solver package (the import root)
    llm_endpoint: str = ""
    llm_model: str = ""
    llm_api_key_env_var: str = "LLM_API_KEY"
    candidates_per_round: int = 3
    editor_evaluator_iterations: int = 3
    slot_order: tuple[str, ...] = DEFAULT_SLOT_ORDER
    training_cutoff_ms: int = 60_000
    training_max_steps: int | None = None  # step cap for deterministic evaluation
    seeds: tuple[int, ...] = (1,)
    mock_mode: bool = False
    mock_fixtures: str | None = None
    solver_package: str = "pbls"
    heuristics_relpath: str = "pbls/heuristics.py"
    parallelism: int = 1
    sweeps: int = 1
    max_rounds: int | None = None
    retries: int = 3

    def __post_init__(self) -> None:
        self.slot_order = tuple(self.slot_order)
        self.seeds = tuple(self.seeds)
        if sorted(self.slot_order) != sorted(SLOT_NAMES):
            raise ConfigError("slot_order must be a permutation of the seven slot names")
        if not self.training_instances:
            raise ConfigError("training_instances must not be empty")
        if self.candidates_per_round < 1 or self.editor_evaluator_iterations < 1:
            raise ConfigError("candidates_per_round and editor_evaluator_iterations must be >= 1")
        if not self.llm_endpoint:
            self.llm_endpoint = os.environ.get("LLM_ENDPOINT", "")
        if not self.llm_model:
            self.llm_model = os.environ.get("LLM_MODEL", "")
        if self.mock_mode and not self.mock_fixtures:
            self.mock_fixtures = os.environ.get("MOCK_FIXTURES")
        if self.mock_mode and not self.mock_fixtures:
            raise ConfigError("mock_mode requires mock_fixtures (or MOCK_FIXTURES in the env)")

    @property
    def heuristics_path(self) -> Path:
        return Path(self.solver_source) / self.heuristics_relpath

    def to_json(self) -> str:
        d = asdict(self)
        d["slot_order"] = list(self.slot_order)
        d["seeds"] = list(self.seeds)
        return json.dumps(d, indent=2)


def load_config(path: str | Path) -> OrchestratorConfig:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return OrchestratorConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"bad config field: {exc}") from None
