import pytest

from pbls_autotune.llm import (
    BackendError,
    ChatRequest,
    MockChatBackend,
    call_with_retries,
)

from conftest import FIXTURES


def req(kind="plan", slot="update_weights", candidate=0, iteration=0):
    return ChatRequest(kind, slot, candidate, iteration, "system", "user")


class TestMockBackend:
    def test_plan_replay(self):
        backend = MockChatBackend.from_file(FIXTURES)
        text = backend.complete(req("plan", "initialize_assignment"))
        assert text.startswith("- ")
        assert "single-literal" in text

    def test_edit_replay_is_fenced(self):
        backend = MockChatBackend.from_file(FIXTURES)
        text = backend.complete(req("edit", "calculate_score"))
        assert text.startswith("```python\n")
        assert "def calculate_score(" in text

    def test_iteration_indexing(self):
        backend = MockChatBackend.from_file(FIXTURES)
        first = backend.complete(req("edit", "update_weights", 0, 0))
        second = backend.complete(req("edit", "update_weights", 0, 1))
        assert first != second

    def test_missing_fixture_raises(self):
        backend = MockChatBackend({"plans": {}, "edits": {}})
        with pytest.raises(BackendError):
            backend.complete(req("plan"))
        with pytest.raises(BackendError):
            backend.complete(req("edit"))

    def test_exhausted_iterations_raise(self):
        backend = MockChatBackend.from_file(FIXTURES)
        with pytest.raises(BackendError):
            backend.complete(req("edit", "calculate_score", 0, 5))

    def test_requests_are_recorded(self):
        backend = MockChatBackend.from_file(FIXTURES)
        backend.complete(req("plan", "penalty_obj"))
        assert backend.calls[-1].slot == "penalty_obj"


class TestRetries:
    class Flaky:
        def __init__(self, fail_times):
            self.fail_times = fail_times
            self.calls = 0

        def complete(self, request):
            self.calls += 1
            if self.calls <= self.fail_times:
                raise BackendError("temporary")
            return "ok"

    def test_succeeds_after_transient_failures(self):
        backend = self.Flaky(2)
        assert call_with_retries(backend, req(), retries=3) == "ok"
        assert backend.calls == 3

    def test_gives_up_after_retries(self):
        backend = self.Flaky(99)
        with pytest.raises(BackendError):
            call_with_retries(backend, req(), retries=3)
        assert backend.calls == 3
