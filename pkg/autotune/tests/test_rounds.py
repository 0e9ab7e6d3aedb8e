import pytest

from pbls.bench import RunRecord

from pbls_autotune.candidate import CandidateVersion, build_candidate
from pbls_autotune.llm import MockChatBackend
from pbls_autotune.rounds import (
    RoundAborted,
    evaluate_modification,
    filter_suggestions,
    plan_modifications,
)

from conftest import SOLVER_SRC, base_config

HEURISTICS = (SOLVER_SRC / "pbls" / "heuristics.py").read_text(encoding="utf-8")


class TestPlanning:
    def test_off_slot_suggestions_filtered(self):
        kept, dropped = filter_suggestions(
            [
                "Use adaptive increments",
                "Rewrite calculate_score to weigh oscore",
                "Track stagnation counters",
            ],
            "update_weights",
        )
        assert kept == ["Use adaptive increments", "Track stagnation counters"]
        assert dropped == ["Rewrite calculate_score to weigh oscore"]

    def test_suggestion_naming_target_slot_is_kept(self):
        kept, dropped = filter_suggestions(
            ["Make update_weights increment quadratically"], "update_weights"
        )
        assert kept and not dropped

    def test_plan_records_dropped_suggestions(self):
        backend = MockChatBackend(
            {"plans": {"update_weights": ["Bump harder", "Touch pick_best_variable ties"]}}
        )
        plan = plan_modifications(backend, HEURISTICS, "update_weights", 0)
        assert plan.suggestions == ["Bump harder"]
        assert plan.dropped == ["Touch pick_best_variable ties"]

    def test_only_off_slot_suggestions_abort_round(self):
        backend = MockChatBackend(
            {"plans": {"update_weights": ["Rework penalty_hard smoothing"]}}
        )
        with pytest.raises(RoundAborted):
            plan_modifications(backend, HEURISTICS, "update_weights", 0)

    def test_backend_refusal_aborts_after_retries(self):
        backend = MockChatBackend({"plans": {}})
        with pytest.raises(RoundAborted, match="after 3 attempts"):
            plan_modifications(backend, HEURISTICS, "update_weights", 0, retries=3)


class TestBuildCandidate:
    def test_clean_edit_builds(self, tmp_path):
        body = (
            "def penalty_hard(viol, weight, smooth):\n"
            "    return 2.0 * weight * viol / smooth\n"
            "\n"
            "\n"
            'penalty_hard.version = "agent.penalty_hard.double"'
        )
        cand = build_candidate("c0", SOLVER_SRC, "penalty_hard", body, tmp_path / "c0")
        assert cand.build_status == "ok"
        assert not cand.triviality_flag
        assert cand.evaluable
        assert "+" in cand.diff_summary and "penalty_hard" in cand.diff_summary

    def test_rename_only_is_trivial_and_not_evaluable(self, tmp_path):
        body = (
            "def penalty_hard(violation, w, divisor):\n"
            '    """Smoothed hard-constraint penalty: weight * violation / smooth."""\n'
            "    return w * violation / divisor\n"
            "\n"
            "\n"
            'penalty_hard.version = "agent.penalty_hard.renamed"'
        )
        cand = build_candidate("c1", SOLVER_SRC, "penalty_hard", body, tmp_path / "c1")
        assert cand.build_status == "ok"
        assert cand.triviality_flag
        assert not cand.evaluable

    def test_syntax_error_is_compile_error_with_log(self, tmp_path):
        cand = build_candidate(
            "c2", SOLVER_SRC, "penalty_hard",
            "def penalty_hard(viol, weight, smooth)\n    return 1\n",
            tmp_path / "c2",
        )
        assert cand.build_status == "compile_error"
        assert "SyntaxError" in cand.build_log or "invalid syntax" in cand.build_log

    def test_runtime_breakage_caught_by_smoke_run(self, tmp_path):
        body = (
            "def penalty_hard(viol, weight, smooth):\n"
            "    return weight * viol / smoooth\n"  # NameError at runtime
            "\n"
            "\n"
            'penalty_hard.version = "agent.penalty_hard.typo"'
        )
        cand = build_candidate("c3", SOLVER_SRC, "penalty_hard", body, tmp_path / "c3")
        assert cand.build_status == "compile_error"
        assert "smoooth" in cand.build_log or "NameError" in cand.build_log

    def test_out_of_scope_rejected(self, tmp_path):
        body = (
            "def penalty_hard(viol, weight, smooth):\n    return viol\n\n"
            "def helper():\n    return 0\n"
        )
        cand = build_candidate("c4", SOLVER_SRC, "penalty_hard", body, tmp_path / "c4")
        assert cand.build_status == "rejected"
        assert "out-of-scope" in cand.rejected_reason


class TestEvaluateModification:
    def baseline(self, instances, seeds=(5,)):
        return [
            RunRecord(str(i), "incumbent", "infeasible", None, 1, s)
            for i in instances
            for s in seeds
        ]

    def test_compile_error_feedback_quotes_log(self, training_instances, tmp_path):
        config = base_config(training_instances, tmp_path / "camp")
        cand = CandidateVersion("cX", "penalty_hard", "body",
                                build_status="compile_error",
                                build_log="SyntaxError: invalid syntax (line 1)")
        feedback = evaluate_modification(cand, self.baseline(training_instances), config)
        assert "failed to build" in feedback
        assert "SyntaxError" in feedback
        assert cand.eval_records == []

    def test_trivial_feedback_requests_substance(self, training_instances, tmp_path):
        config = base_config(training_instances, tmp_path / "camp")
        cand = CandidateVersion("cX", "penalty_hard", "body",
                                build_status="ok", triviality_flag=True)
        feedback = evaluate_modification(cand, self.baseline(training_instances), config)
        assert "trivial" in feedback
        assert cand.eval_records == []

    def test_rejected_feedback_names_reason(self, training_instances, tmp_path):
        config = base_config(training_instances, tmp_path / "camp")
        cand = CandidateVersion("cX", "penalty_hard", "body",
                                rejected_reason="out-of-scope edit: extra function")
        feedback = evaluate_modification(cand, self.baseline(training_instances), config)
        assert "out-of-scope" in feedback

    def test_winning_candidate_reports_counts(self, training_instances, tmp_path):
        config = base_config(training_instances, tmp_path / "camp")
        import json

        fixtures = json.loads(open(config.mock_fixtures).read())
        body = fixtures["edits"]["initialize_assignment"][0][0]
        cand = build_candidate("seeded", SOLVER_SRC, "initialize_assignment", body,
                               tmp_path / "seeded")
        assert cand.evaluable
        feedback = evaluate_modification(cand, self.baseline(training_instances), config)
        assert f"feasible_count: {len(training_instances)}/" in feedback
        assert f"win_count_vs_baseline: {len(training_instances)}" in feedback
        assert len(cand.eval_records) == len(training_instances)
        assert all(r.status == "feasible" for r in cand.eval_records)

    def test_inert_candidate_told_to_go_bigger(self, training_instances, tmp_path):
        config = base_config(training_instances, tmp_path / "camp")
        import json

        fixtures = json.loads(open(config.mock_fixtures).read())
        body = fixtures["edits"]["update_weights"][0][1]  # restructured equivalent
        cand = build_candidate("inert", SOLVER_SRC, "update_weights", body,
                               tmp_path / "inert")
        assert cand.evaluable
        baseline = [
            RunRecord(str(i), "incumbent", "infeasible", None, 1, 5)
            for i in training_instances
        ]
        feedback = evaluate_modification(cand, baseline, config)
        assert "win_count_vs_baseline: 0" in feedback
        assert "inert" in feedback or "larger modification" in feedback
