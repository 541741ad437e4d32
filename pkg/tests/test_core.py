import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankforge import (
    AttributeSpec,
    IndicatorSpec,
    NoBaselineError,
    RankingSystemSpec,
    SchemaError,
    ValidationError,
    aggregate_final_score,
    rank_entities,
    relative_change,
)
from rankforge.core import KIND_ATTRIBUTE, KIND_FINAL, KIND_INDICATOR


def two_indicator_spec(w1=0.5, w2=0.5):
    return RankingSystemSpec(
        attributes=(AttributeSpec("a", "A", "u", 0.0, 10.0),),
        indicators=(
            IndicatorSpec("x", "X", w1, ("a",)),
            IndicatorSpec("y", "Y", w2, ("a",)),
        ),
    )


class TestSpecValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="sum to 1"):
            two_indicator_spec(0.5, 0.4)

    def test_weight_out_of_range(self):
        with pytest.raises(ValidationError, match="weight"):
            IndicatorSpec("x", "X", 1.5, ("a",))

    def test_empty_group_rejected(self):
        with pytest.raises(ValidationError, match="group is empty"):
            IndicatorSpec("x", "X", 1.0, ())

    def test_group_must_reference_declared_attributes(self):
        with pytest.raises(ValidationError, match="undeclared"):
            RankingSystemSpec(
                attributes=(AttributeSpec("a", "A", "u", 0.0, 1.0),),
                indicators=(IndicatorSpec("x", "X", 1.0, ("nope",)),),
            )

    def test_orphan_attribute_rejected(self):
        with pytest.raises(ValidationError, match="no indicator group"):
            RankingSystemSpec(
                attributes=(
                    AttributeSpec("a", "A", "u", 0.0, 1.0),
                    AttributeSpec("b", "B", "u", 0.0, 1.0),
                ),
                indicators=(IndicatorSpec("x", "X", 1.0, ("a",)),),
            )

    def test_score_bounds_ordered(self):
        with pytest.raises(ValidationError, match="score_min"):
            RankingSystemSpec(
                attributes=(AttributeSpec("a", "A", "u", 0.0, 1.0),),
                indicators=(IndicatorSpec("x", "X", 1.0, ("a",)),),
                score_min=100.0,
                score_max=1.0,
            )

    def test_attribute_domain_ordered(self):
        with pytest.raises(ValidationError, match="domain_min"):
            AttributeSpec("a", "A", "u", 5.0, 5.0)

    def test_json_round_trip(self, small_spec):
        doc = small_spec.to_dict()
        assert RankingSystemSpec.from_dict(doc) == small_spec


class TestAggregateFinalScore:
    def test_symmetric_mean(self):
        spec = two_indicator_spec()
        assert aggregate_final_score({"x": 60.0, "y": 40.0}, spec) == 50.0

    def test_identity_single_indicator(self):
        spec = RankingSystemSpec(
            attributes=(AttributeSpec("a", "A", "u", 0.0, 1.0),),
            indicators=(IndicatorSpec("x", "X", 1.0, ("a",)),),
        )
        assert aggregate_final_score({"x": 73.2}, spec) == 73.2

    def test_three_way_dot_product(self):
        spec = RankingSystemSpec(
            attributes=(AttributeSpec("a", "A", "u", 0.0, 1.0),),
            indicators=(
                IndicatorSpec("x", "X", 0.4, ("a",)),
                IndicatorSpec("y", "Y", 0.4, ("a",)),
                IndicatorSpec("z", "Z", 0.2, ("a",)),
            ),
        )
        scores = {"x": 80.0, "y": 50.0, "z": 10.0}
        # Independent dot-product oracle.
        expected = 0.4 * 80.0 + 0.4 * 50.0 + 0.2 * 10.0
        assert expected == 54.0
        assert aggregate_final_score(scores, spec) == pytest.approx(54.0)

    def test_missing_indicator_is_schema_error(self):
        with pytest.raises(SchemaError, match="missing"):
            aggregate_final_score({"x": 50.0}, two_indicator_spec())

    def test_unknown_indicator_is_schema_error(self):
        with pytest.raises(SchemaError, match="unknown"):
            aggregate_final_score({"x": 50.0, "y": 50.0, "zz": 1.0}, two_indicator_spec())

    def test_monotone_in_each_indicator(self):
        spec = two_indicator_spec(0.3, 0.7)
        rng = np.random.default_rng(0)
        for _ in range(50):
            s1, s2 = rng.uniform(1, 100, 2)
            bump = rng.uniform(0, 100 - s1)
            base = aggregate_final_score({"x": s1, "y": s2}, spec)
            raised = aggregate_final_score({"x": s1 + bump, "y": s2}, spec)
            assert raised >= base

    @given(
        st.floats(min_value=1.0, max_value=100.0),
        st.floats(min_value=1.0, max_value=100.0),
    )
    def test_output_always_within_bounds(self, s1, s2):
        spec = two_indicator_spec(0.25, 0.75)
        result = aggregate_final_score({"x": s1, "y": s2}, spec)
        assert 1.0 <= result <= 100.0


def competition_rank_oracle(scores):
    # Independent definition: rank = 1 + number of strictly better scores.
    return {rid: 1 + sum(1 for v in scores.values() if v > s) for rid, s in scores.items()}


class TestRankEntities:
    def test_strict_ordering(self):
        assert rank_entities({"A": 90.0, "B": 80.0, "C": 70.0}) == {"A": 1, "B": 2, "C": 3}

    def test_ties_share_smallest_rank(self):
        assert rank_entities({"A": 90.0, "B": 90.0, "C": 70.0}) == {"A": 1, "B": 1, "C": 3}

    def test_matches_sort_oracle_on_distinct_scores(self):
        rng = np.random.default_rng(11)
        scores = {f"e{k}": float(v) for k, v in enumerate(rng.permutation(400))}
        order = sorted(scores, key=lambda k: -scores[k])
        expected = {rid: pos + 1 for pos, rid in enumerate(order)}
        assert rank_entities(scores) == expected

    def test_matches_counting_oracle_with_ties(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(1, 40))
            scores = {f"e{k}": float(rng.integers(0, 10)) for k in range(n)}
            assert rank_entities(scores) == competition_rank_oracle(scores)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(3)
        scores = {f"e{k}": float(v) for k, v in enumerate(rng.uniform(0, 100, 60))}
        transformed = {k: math.exp(v / 50.0) for k, v in scores.items()}
        assert rank_entities(scores) == rank_entities(transformed)

    def test_rank_one_exists_and_max_bounded(self):
        rng = np.random.default_rng(9)
        scores = {f"e{k}": float(rng.integers(0, 5)) for k in range(20)}
        ranks = rank_entities(scores)
        assert min(ranks.values()) == 1
        assert max(ranks.values()) <= len(scores)

    def test_empty_map_rejected(self):
        with pytest.raises(ValidationError):
            rank_entities({})


class TestRelativeChange:
    @pytest.mark.parametrize(
        "current,previous,expected",
        [(55.0, 50.0, 5.0), (50.0, 50.0, 0.0), (47.3, 51.1, 47.3 - 51.1)],
    )
    def test_signed_difference(self, current, previous, expected):
        change = relative_change(current, previous, KIND_INDICATOR, "i1")
        assert change.value == expected
        assert change.baseline == previous

    def test_missing_baseline_never_silently_zero(self):
        with pytest.raises(NoBaselineError):
            relative_change(50.0, None, KIND_ATTRIBUTE, "a1")
        with pytest.raises(NoBaselineError):
            relative_change(50.0, float("nan"), KIND_FINAL, "final")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            relative_change(1.0, 2.0, "bogus", "a1")
