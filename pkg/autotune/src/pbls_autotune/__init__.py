"""Multi-agent greedy optimization loop for the pbls solver's heuristic slots.

One round targets one slot: a planner agent proposes modifications, an
editor agent realizes them as slot-region rewrites, the evaluator runs each
built candidate on the training grid and feeds results back, and the round
winner (feasibility count first, then wins against the incumbent) is spliced
into the working solver tree before the next round starts. The solver itself
is always driven through its command-line contract in child processes.
"""

from .campaign import run_campaign
from .candidate import CandidateVersion, build_candidate
from .config import DEFAULT_SLOT_ORDER, SLOT_NAMES, ConfigError, OrchestratorConfig, load_config
from .llm import BackendError, ChatRequest, HttpChatBackend, MockChatBackend, make_backend
from .prompts import AgentPrompt, build_prompt
from .rounds import (
    RoundAborted,
    RoundPlan,
    RoundResult,
    edit_code,
    evaluate_modification,
    plan_modifications,
    run_round,
)

__version__ = "0.1.0"
