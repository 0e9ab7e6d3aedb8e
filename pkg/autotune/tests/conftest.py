import random
import socket
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
SOLVER_SRC = REPO_ROOT / "src"
FIXTURES = Path(__file__).resolve().parents[1] / "fixtures" / "mock_campaign.json"


def make_unit_instance(path: Path, seed: int, num_vars: int = 120) -> None:
    """Pure-feasibility instance forcing one hidden 0/1 pattern via
    single-literal constraints. A random start mismatches ~half the pattern,
    far beyond the tiny step budgets the campaign tests use, so the stock
    random initializer cannot finish while a unit-seeding initializer is
    feasible at step zero."""
    rng = random.Random(seed)
    lines = []
    for v in range(1, num_vars + 1):
        if rng.randrange(2):
            lines.append(f"+1 x{v} >= 1 ;")
        else:
            lines.append(f"+1 ~x{v} >= 1 ;")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def training_instances(tmp_path_factory):
    root = tmp_path_factory.mktemp("training")
    paths = []
    for i, seed in enumerate((101, 102, 103)):
        path = root / f"unit{i}.opb"
        make_unit_instance(path, seed)
        paths.append(str(path))
    return paths


@pytest.fixture(scope="session")
def training_instances_ten(tmp_path_factory):
    root = tmp_path_factory.mktemp("training10")
    paths = []
    for i in range(10):
        path = root / f"unit{i}.opb"
        make_unit_instance(path, 500 + i)
        paths.append(str(path))
    return paths


@pytest.fixture
def no_network(monkeypatch):
    """Any in-process socket use fails the test; child processes (the solver
    CLI) are unaffected and need no network anyway."""

    def bomb(*args, **kwargs):
        raise AssertionError("network operation attempted in mock mode")

    monkeypatch.setattr(socket, "socket", bomb)
    monkeypatch.setattr(socket, "create_connection", bomb)
    return bomb


def base_config(training, campaign_dir, **overrides):
    from pbls_autotune.config import OrchestratorConfig

    kwargs = dict(
        training_instances=list(training),
        campaign_dir=str(campaign_dir),
        solver_source=str(SOLVER_SRC),
        mock_mode=True,
        mock_fixtures=str(FIXTURES),
        candidates_per_round=2,
        editor_evaluator_iterations=2,
        seeds=(5,),
        training_cutoff_ms=10_000,
        training_max_steps=40,
        parallelism=2,
    )
    kwargs.update(overrides)
    return OrchestratorConfig(**kwargs)
