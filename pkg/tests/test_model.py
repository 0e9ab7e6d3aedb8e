import random

import pytest

from pbls.model import (
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
    violation,
)

from helpers import all_assignments, eval_raw, random_raw_constraint, satisfied_normalized


def norm1(terms, op, b):
    out = normalize_constraint(RawConstraint(list(terms), op, b))
    assert len(out) == 1
    return out[0]


class TestNormalize:
    def test_strict_greater_shifts_threshold(self):
        c = norm1([(2, Literal(1)), (1, Literal(2))], ">", 2)
        assert c.terms == ((2, Literal(1)), (1, Literal(2)))
        assert c.threshold == 3

    def test_negative_coefficient_flips_polarity(self):
        c = norm1([(-2, Literal(1)), (3, Literal(2))], ">=", 1)
        assert c.terms == ((2, Literal(1, True)), (3, Literal(2)))
        assert c.threshold == 3

    def test_equality_splits_into_pair(self):
        out = normalize_constraint(
            RawConstraint([(1, Literal(1)), (1, Literal(2))], "=", 1)
        )
        assert [(c.terms, c.threshold) for c in out] == [
            (((1, Literal(1)), (1, Literal(2))), 1),
            (((1, Literal(1, True)), (1, Literal(2, True))), 1),
        ]
        assert [c.cid for c in out] == [0, 1]

    def test_less_equal(self):
        c = norm1([(3, Literal(1))], "<=", 1)
        assert c.terms == ((3, Literal(1, True)),)
        assert c.threshold == 2

    def test_duplicate_variable_merging(self):
        # 3 x1 + 1 ~x1 >= 2  ==  2 x1 + 1 >= 2  ==  2 x1 >= 1
        c = norm1([(3, Literal(1)), (1, Literal(1, True))], ">=", 2)
        assert c.terms == ((2, Literal(1)),)
        assert c.threshold == 1

    def test_tautology_dropped(self):
        out = normalize_constraint(
            RawConstraint([(1, Literal(1)), (1, Literal(1, True))], ">=", 1)
        )
        assert out == []

    def test_contradiction_kept_as_empty_terms(self):
        out = normalize_constraint(
            RawConstraint([(1, Literal(1)), (1, Literal(1, True))], ">=", 3)
        )
        assert len(out) == 1
        assert out[0].terms == ()
        assert out[0].threshold == 2

    def test_unknown_operator_rejected(self):
        with pytest.raises(ValueError):
            normalize_constraint(RawConstraint([(1, Literal(1))], "!=", 0))

    def test_overflow_rejected(self):
        with pytest.raises(ArithmeticRangeError):
            normalize_constraint(RawConstraint([(2**63, Literal(1))], ">=", 1))
        with pytest.raises(ArithmeticRangeError):
            # threshold pushed past the 64-bit line by polarity rewriting
            normalize_constraint(RawConstraint([(-(2**63 - 1), Literal(1))], ">=", 2))

    def test_satisfying_sets_preserved(self):
        rng = random.Random(7)
        for _ in range(200):
            raw = random_raw_constraint(rng)
            normalized = normalize_constraint(raw)
            for values in all_assignments(4):
                assert eval_raw(raw, values) == satisfied_normalized(normalized, values), (
                    raw,
                    normalized,
                    values,
                )


class TestEvaluation:
    def setup_method(self):
        self.c = PBConstraint(((2, Literal(1)), (3, Literal(2))), 4, 0)

    def test_violation_satisfied(self):
        assert violation(self.c, [0, 1, 1]) == 0

    def test_violation_shortfall(self):
        assert violation(self.c, [0, 1, 0]) == 2
        assert violation(self.c, [0, 0, 0]) == 4

    def test_objective_value(self):
        o = Objective(((3, Literal(1)), (2, Literal(2, True))), 5)
        assert objective_value(o, [0, 0, 0]) == 7
        assert objective_value(o, [0, 1, 1]) == 8

    def test_constant_objective(self):
        o = Objective((), -4)
        assert objective_value(o, [0, 1, 0]) == -4

    def test_is_feasible(self):
        inst = PBOInstance(
            2,
            (
                PBConstraint(((2, Literal(1)), (3, Literal(2))), 4, 0),
                PBConstraint(((1, Literal(1)), (1, Literal(2))), 2, 1),
            ),
        )
        assert is_feasible(inst, [0, 1, 1])
        assert not is_feasible(inst, [0, 1, 0])

    def test_singleton_feasible(self):
        inst = PBOInstance(2, (PBConstraint(((1, Literal(1)), (1, Literal(2))), 1, 0),))
        assert is_feasible(inst, [0, 1, 0])

    def test_contradictory_pair_never_feasible(self):
        inst = PBOInstance(
            1,
            (
                PBConstraint(((1, Literal(1)),), 1, 0),
                PBConstraint(((1, Literal(1, True)),), 1, 1),
            ),
        )
        for values in all_assignments(1):
            assert not is_feasible(inst, values)


class TestAssignment:
    def _random_instance(self, rng):
        from helpers import random_instance

        return random_instance(rng, max_vars=12)

    def test_slack_viol_coherence(self):
        rng = random.Random(3)
        for _ in range(20):
            inst = self._random_instance(rng)
            alpha = Assignment.random(inst, rng)
            for _ in range(50):
                alpha.flip(rng.randint(1, inst.num_vars))
            for c in inst.constraints:
                assert alpha.violation(c.cid) == violation(c, alpha.values)
                assert (alpha.slack[c.cid] >= 0) == (violation(c, alpha.values) == 0)

    def test_cached_obj_tracks_flips(self):
        rng = random.Random(4)
        for _ in range(20):
            inst = self._random_instance(rng)
            alpha = Assignment.random(inst, rng)
            for _ in range(80):
                alpha.flip(rng.randint(1, inst.num_vars))
                assert alpha.cached_obj == objective_value(inst.objective, alpha.values)

    def test_flip_involution(self):
        rng = random.Random(5)
        inst = self._random_instance(rng)
        alpha = Assignment.random(inst, rng)
        before = (list(alpha.values), list(alpha.slack), alpha.cached_obj)
        x = rng.randint(1, inst.num_vars)
        alpha.flip(x)
        alpha.flip(x)
        assert (alpha.values, alpha.slack, alpha.cached_obj) == before

    def test_is_feasible_matches_oracle(self):
        rng = random.Random(6)
        inst = self._random_instance(rng)
        alpha = Assignment.random(inst, rng)
        for _ in range(60):
            alpha.flip(rng.randint(1, inst.num_vars))
            assert alpha.is_feasible() == is_feasible(inst, alpha.values)


class TestInstanceValidation:
    def test_constraint_ids_must_be_dense(self):
        with pytest.raises(ValueError):
            PBOInstance(1, (PBConstraint(((1, Literal(1)),), 1, 5),))

    def test_literal_out_of_range(self):
        with pytest.raises(ValueError):
            PBOInstance(1, (PBConstraint(((1, Literal(2)),), 1, 0),))

    def test_objective_literal_out_of_range(self):
        with pytest.raises(ValueError):
            PBOInstance(1, (), Objective(((1, Literal(3)),), 0))
