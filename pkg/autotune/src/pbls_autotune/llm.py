"""Chat backends: a live HTTP client and a fixture-replay mock.

Every agent call is a ChatRequest tagged with its place in the campaign
(plan/edit, slot, candidate index, editor iteration). The live backend
ignores the tags and posts the messages; the mock backend uses them to look
up a canned response, performing no network operations at all (it does not
even import an HTTP client).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path


class BackendError(RuntimeError):
    """The backend could not produce a response (timeout, refusal, missing fixture)."""


@dataclass
class ChatRequest:
    kind: str  # "plan" | "edit"
    slot: str
    candidate: int
    iteration: int
    system: str
    user: str


class HttpChatBackend:
    """OpenAI-style chat-completion client (POST {model, messages})."""

    def __init__(self, endpoint: str, model: str, api_key_env_var: str = "LLM_API_KEY",
                 timeout_s: float = 120.0):
        if not endpoint or not model:
            raise BackendError("llm endpoint and model must be configured for live mode")
        self.endpoint = endpoint
        self.model = model
        self.api_key = os.environ.get(api_key_env_var, "")
        self.timeout_s = timeout_s

    def complete(self, request: ChatRequest) -> str:
        import requests  # lazy: mock mode must not pull in an HTTP stack

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers,
                                 timeout=self.timeout_s)
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except Exception as exc:  # noqa: BLE001 - every failure mode maps to a retry
            raise BackendError(f"chat completion failed: {exc}") from exc


class MockChatBackend:
    """Replays canned responses from a fixtures file; zero network operations.

    Fixture schema:
        {"plans": {slot: [suggestion, ...]},
         "edits": {slot: [[body per iteration, ...] per candidate, ...]}}
    """

    def __init__(self, fixtures: dict):
        self.fixtures = fixtures
        self.calls: list[ChatRequest] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "MockChatBackend":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, request: ChatRequest) -> str:
        self.calls.append(request)
        if request.kind == "plan":
            suggestions = self.fixtures.get("plans", {}).get(request.slot)
            if not suggestions:
                raise BackendError(f"no plan fixture for slot {request.slot!r}")
            return "\n".join(f"- {s}" for s in suggestions)
        if request.kind == "edit":
            per_candidate = self.fixtures.get("edits", {}).get(request.slot, [])
            if request.candidate >= len(per_candidate):
                raise BackendError(
                    f"no edit fixture for slot {request.slot!r} candidate {request.candidate}"
                )
            iterations = per_candidate[request.candidate]
            if request.iteration >= len(iterations):
                raise BackendError(
                    f"no edit fixture for slot {request.slot!r} candidate "
                    f"{request.candidate} iteration {request.iteration}"
                )
            return f"```python\n{iterations[request.iteration]}\n```"
        raise BackendError(f"unknown request kind {request.kind!r}")


def make_backend(config):
    if config.mock_mode:
        return MockChatBackend.from_file(config.mock_fixtures)
    return HttpChatBackend(config.llm_endpoint, config.llm_model, config.llm_api_key_env_var)


def call_with_retries(backend, request: ChatRequest, retries: int = 3,
                      backoff_s: float = 0.0) -> str:
    last: BackendError | None = None
    for attempt in range(retries):
        try:
            return backend.complete(request)
        except BackendError as exc:
            last = exc
            if backoff_s and attempt + 1 < retries:
                time.sleep(backoff_s * (attempt + 1))
    raise last if last is not None else BackendError("backend never responded")
