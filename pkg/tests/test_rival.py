import numpy as np
import pytest

from rankforge import (
    RankeeRecord,
    RivalMethod,
    RivalMethodError,
    ValidationError,
    default_methods,
    heatmap,
    predict_indicator,
    predict_rival,
    radar_data,
    score_distribution,
    win_probability,
)
from rankforge.core import FINAL
from rankforge.rival import CARRY_FORWARD, MODEL_BASED, TREND_EXTRAPOLATION

from conftest import make_prediction


def rival_record(rid, year, score, spec, attrs=None):
    return RankeeRecord(
        rankee_id=rid,
        year=year,
        attribute_values=attrs or {a: 50.0 for a in spec.attribute_ids},
        indicator_scores={i: score for i in spec.indicator_ids},
        final_score=score,
        rank=1,
    )


class TestPredictRival:
    def test_carry_forward_single_year_is_constant(self, small_spec, noiseless_model):
        history = [rival_record("B", 2024, 70.0, small_spec)]
        preds = predict_rival(
            RivalMethod(CARRY_FORWARD), history, noiseless_model, small_spec
        )
        for subject in list(small_spec.indicator_ids) + [FINAL]:
            assert preds[subject].min == preds[subject].max == 70.0
            assert preds[subject].member_count == noiseless_model.member_count

    def test_carry_forward_draws_from_residuals(self, small_spec, noiseless_model):
        history = [
            rival_record("B", 2022, 60.0, small_spec),
            rival_record("B", 2023, 62.0, small_spec),
            rival_record("B", 2024, 66.0, small_spec),
        ]
        preds = predict_rival(
            RivalMethod(CARRY_FORWARD), history, noiseless_model, small_spec
        )
        # Residuals are {+2, +4}, so members live on {68, 70}.
        assert set(np.unique(preds[FINAL].members)) <= {68.0, 70.0}

    def test_trend_extrapolates_one_year(self, small_spec, noiseless_model):
        history = [
            rival_record("B", 1, 50.0, small_spec),
            rival_record("B", 2, 60.0, small_spec),
        ]
        preds = predict_rival(
            RivalMethod(TREND_EXTRAPOLATION), history, noiseless_model, small_spec
        )
        # Perfect line: zero residuals, constant ensemble at the extrapolation.
        assert preds[FINAL].min == pytest.approx(70.0)
        assert preds[FINAL].max == pytest.approx(70.0)

    def test_trend_requires_two_years(self, small_spec, noiseless_model):
        history = [rival_record("B", 2024, 50.0, small_spec)]
        with pytest.raises(RivalMethodError, match=">= 2 years"):
            predict_rival(
                RivalMethod(TREND_EXTRAPOLATION), history, noiseless_model, small_spec
            )

    def test_trend_window_limits_years(self, small_spec, noiseless_model):
        # 2020-2022 flat at 40, then a steep line; window=2 sees only the line.
        history = [
            rival_record("B", y, s, small_spec)
            for y, s in [(2020, 40.0), (2021, 40.0), (2022, 40.0), (2023, 50.0), (2024, 60.0)]
        ]
        preds = predict_rival(
            RivalMethod(TREND_EXTRAPOLATION, trend_window=2),
            history,
            noiseless_model,
            small_spec,
        )
        assert preds[FINAL].mean == pytest.approx(70.0)

    def test_model_based_matches_our_prediction_on_same_inputs(
        self, small_spec, noiseless_model, baseline
    ):
        history = [
            rival_record("B", 2024, 50.0, small_spec, attrs=dict(baseline.attribute_values))
        ]
        preds = predict_rival(
            RivalMethod(MODEL_BASED), history, noiseless_model, small_spec
        )
        for iid in small_spec.indicator_ids:
            ours = predict_indicator(noiseless_model, iid, baseline.attribute_values)
            assert np.array_equal(preds[iid].members, ours.members)

    def test_empty_history_rejected(self, small_spec, noiseless_model):
        with pytest.raises(RivalMethodError):
            predict_rival(RivalMethod(CARRY_FORWARD), [], noiseless_model, small_spec)

    def test_mixed_rankee_history_rejected(self, small_spec, noiseless_model):
        history = [
            rival_record("B", 2023, 50.0, small_spec),
            rival_record("C", 2024, 50.0, small_spec),
        ]
        with pytest.raises(ValidationError, match="mixes"):
            predict_rival(RivalMethod(CARRY_FORWARD), history, noiseless_model, small_spec)

    def test_deterministic_across_calls(self, small_spec, noiseless_model):
        history = [
            rival_record("B", 2022, 60.0, small_spec),
            rival_record("B", 2024, 66.0, small_spec),
        ]
        a = predict_rival(RivalMethod(CARRY_FORWARD), history, noiseless_model, small_spec)
        b = predict_rival(RivalMethod(CARRY_FORWARD), history, noiseless_model, small_spec)
        assert np.array_equal(a[FINAL].members, b[FINAL].members)

    def test_unknown_method_rejected(self):
        with pytest.raises(ValidationError):
            RivalMethod("prophecy")


def win_probability_oracle(a, b):
    wins = 0.0
    for x in a:
        for y in b:
            if x > y:
                wins += 1.0
            elif x == y:
                wins += 0.5
    return wins / (len(a) * len(b))


class TestWinProbability:
    def test_identical_ensembles_are_even(self):
        p = make_prediction([50.0, 60.0, 70.0])
        assert win_probability(p, p) == 0.5

    def test_dominance(self):
        assert win_probability(make_prediction([90.0] * 3), make_prediction([80.0] * 4)) == 1.0

    def test_hand_enumerated_pairs(self):
        # ours {1,2,3} vs rival {2,2}: (0 + 0.5 + 0.5 + 1 + 1) / 6 = 0.5
        ours = make_prediction([1.0, 2.0, 3.0])
        rival = make_prediction([2.0, 2.0])
        assert win_probability(ours, rival) == 0.5

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(200):
            a = rng.integers(0, 6, size=rng.integers(1, 10)).astype(float)
            b = rng.integers(0, 6, size=rng.integers(1, 10)).astype(float)
            pa, pb = make_prediction(a), make_prediction(b)
            assert win_probability(pa, pb) == win_probability_oracle(a, b)

    def test_exact_complementarity(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            a = make_prediction(rng.integers(0, 8, size=rng.integers(1, 40)).astype(float))
            b = make_prediction(rng.integers(0, 8, size=rng.integers(1, 40)).astype(float))
            assert win_probability(a, b) + win_probability(b, a) == 1.0

    def test_invariant_under_common_shift_and_monotone_map(self):
        rng = np.random.default_rng(99)
        a = rng.uniform(1, 100, 30)
        b = rng.uniform(1, 100, 20)
        base = win_probability(make_prediction(a), make_prediction(b))
        shifted = win_probability(make_prediction(a + 7.5), make_prediction(b + 7.5))
        warped = win_probability(make_prediction(np.exp(a / 40)), make_prediction(np.exp(b / 40)))
        assert base == shifted == warped


class TestHeatmap:
    def make_scenario(self, small_spec, noiseless_model, baseline):
        from rankforge import AttributeRange, generate_scenarios

        return generate_scenarios(
            [AttributeRange("a1", (40.0,))], baseline, noiseless_model, small_spec
        )[0]

    def test_cell_grid_shape_and_oracle(self, small_spec, noiseless_model, baseline):
        scenario = self.make_scenario(small_spec, noiseless_model, baseline)
        rivals = {
            "B": [
                rival_record("B", 2023, 55.0, small_spec),
                rival_record("B", 2024, 58.0, small_spec),
            ],
            "C": [
                rival_record("C", 2023, 70.0, small_spec),
                rival_record("C", 2024, 65.0, small_spec),
            ],
        }
        methods = default_methods()
        cells = heatmap(scenario, rivals, methods, noiseless_model, small_spec)
        n_subjects = len(small_spec.indicator_ids) + 1
        assert len(cells) == 2 * 3 * n_subjects
        ours = dict(scenario.indicator_predictions)
        ours[FINAL] = scenario.final_prediction
        for cell in cells:
            preds = predict_rival(
                RivalMethod(cell.method_id), rivals[cell.rival_id], noiseless_model, small_spec
            )
            assert cell.probability == win_probability(ours[cell.subject], preds[cell.subject])

    def test_method_failure_flags_cells(self, small_spec, noiseless_model, baseline):
        scenario = self.make_scenario(small_spec, noiseless_model, baseline)
        rivals = {"B": [rival_record("B", 2024, 55.0, small_spec)]}  # single year
        cells = heatmap(scenario, rivals, default_methods(), noiseless_model, small_spec)
        trend_cells = [c for c in cells if c.method_id == TREND_EXTRAPOLATION]
        other_cells = [c for c in cells if c.method_id != TREND_EXTRAPOLATION]
        assert all(c.probability is None and c.flag for c in trend_cells)
        assert all(c.probability is not None for c in other_cells)

    def test_dominated_rival_gives_certain_cells(self, small_spec, noiseless_model, baseline):
        scenario = self.make_scenario(small_spec, noiseless_model, baseline)
        rivals = {"B": [rival_record("B", 2024, 1.0, small_spec)]}
        cells = heatmap(
            scenario, rivals, [RivalMethod(CARRY_FORWARD)], noiseless_model, small_spec
        )
        # Rival stuck at the lower bound: every cell is (almost surely) a win.
        for cell in cells:
            assert cell.probability >= 0.99


class TestRadar:
    def test_constant_ensemble_mass_in_single_bin(self, small_spec):
        pred = make_prediction([70.0] * 25, FINAL)
        dist = score_distribution(pred, small_spec)
        assert dist.density.sum() == pytest.approx(1.0, abs=1e-9)
        hot = np.nonzero(dist.density)[0]
        assert len(hot) == 1
        lo, hi = dist.bin_edges[hot[0]], dist.bin_edges[hot[0] + 1]
        assert lo <= 70.0 <= hi

    def test_density_normalized_for_any_ensemble(self, small_spec):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pred = make_prediction(rng.uniform(1, 100, int(rng.integers(1, 200))))
            dist = score_distribution(pred, small_spec)
            assert dist.density.sum() == pytest.approx(1.0, abs=1e-9)

    def test_payload_structure_and_highlight(self, small_spec, noiseless_model, baseline):
        from rankforge import AttributeRange, generate_scenarios

        scenario = generate_scenarios(
            [AttributeRange("a1", (40.0,))], baseline, noiseless_model, small_spec
        )[0]
        rivals = {
            "B": [rival_record("B", 2024, 55.0, small_spec)],
            "C": [rival_record("C", 2024, 60.0, small_spec)],
        }
        payload = radar_data(
            scenario, rivals, RivalMethod(CARRY_FORWARD), noiseless_model, small_spec,
            highlight="C",
        )
        assert set(payload) == set(small_spec.indicator_ids) | {FINAL}
        entry = payload[FINAL]
        assert set(entry.rival_expected) == {"B", "C"}
        assert entry.rival_expected["C"] == pytest.approx(60.0)
        assert entry.highlighted is not None
        assert entry.ours.density.sum() == pytest.approx(1.0, abs=1e-9)

    def test_unknown_highlight_rejected(self, small_spec, noiseless_model, baseline):
        from rankforge import AttributeRange, generate_scenarios

        scenario = generate_scenarios(
            [AttributeRange("a1", (40.0,))], baseline, noiseless_model, small_spec
        )[0]
        with pytest.raises(ValidationError, match="unknown rival"):
            radar_data(
                scenario, {}, RivalMethod(CARRY_FORWARD), noiseless_model, small_spec,
                highlight="Z",
            )
