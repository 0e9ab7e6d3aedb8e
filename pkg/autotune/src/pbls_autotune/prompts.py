"""Prompt configuration for the three agents.

All three share one role; each gets its own tasks and tips, and every prompt
ends with the complete current heuristics source so the agents share the same
context for a given round state.
"""

from __future__ import annotations

from dataclasses import dataclass

ROLE_TEXT = (
    "You are a solver researcher working on a stochastic local search solver "
    "for pseudo-Boolean optimization. The solver's search behavior is fully "
    "determined by seven independently replaceable heuristic functions "
    "(slots) delimited by '# SLOT-BEGIN <name>' / '# SLOT-END <name>' "
    "comments. Your goal is to make the solver find feasible solutions more "
    "often and reach better objective values within the same budget."
)

PLANNER_TASKS = (
    "Study the solver code below, focus on the single target slot named in "
    "the request, and propose concrete modification plans for that slot "
    "only. Each plan must be one line starting with '- ', self-contained, "
    "and implementable by editing just the target slot's body."
)
PLANNER_TIPS = (
    "Think about dynamic behavior: how scores, weights, and variable ages "
    "interact over a run; when the search stagnates; how tie-breaking and "
    "sampling width change diversification. Prefer plans that change search "
    "behavior, not cosmetic rewrites. Do not propose edits to other slots."
)

EDITOR_TASKS = (
    "Implement the given modification plan by rewriting the target slot. "
    "Respond with one fenced python code block containing the complete "
    "replacement for the slot region: the function definition (same name, "
    "same signature) and its trailing '<name>.version = ...' attribute line "
    "with a new version string. Change nothing outside the slot."
)
EDITOR_TIPS = (
    "Keep the function signature and return contract exactly as documented "
    "in the module docstring; the engine calls slots positionally. Avoid "
    "renames-only or comment-only changes, they are discarded as trivial. "
    "Mind determinism: all randomness must come from the provided rng."
)

EVALUATOR_TASKS = (
    "Evaluate the modified solver against the incumbent on the training "
    "instances: feasibility count first, then the number of instances with "
    "a strictly better objective. Report regressions per instance and advise "
    "the editor what to try next."
)
EVALUATOR_TIPS = (
    "A compile error or contract violation must be repaired before anything "
    "else. Zero wins with equal feasibility means the change is behaviorally "
    "inert on this training set; suggest a more substantial change."
)

_AGENTS = {
    "planner": (PLANNER_TASKS, PLANNER_TIPS),
    "editor": (EDITOR_TASKS, EDITOR_TIPS),
    "evaluator": (EVALUATOR_TASKS, EVALUATOR_TIPS),
}


@dataclass
class AgentPrompt:
    role_text: str
    tasks_text: str
    tips_text: str
    solver_code: str

    def system(self) -> str:
        return self.role_text

    def user(self, request_text: str) -> str:
        return (
            f"## Tasks\n{self.tasks_text}\n\n"
            f"## Tips\n{self.tips_text}\n\n"
            f"## Request\n{request_text}\n\n"
            f"## Solver code\n```python\n{self.solver_code}\n```"
        )


def build_prompt(agent: str, solver_code: str) -> AgentPrompt:
    tasks, tips = _AGENTS[agent]
    return AgentPrompt(ROLE_TEXT, tasks, tips, solver_code)
