import json

import numpy as np
import pytest

from rankforge import (
    AttributeRange,
    HistoryTable,
    RankeeRecord,
    SchemaError,
    SessionError,
    SyntheticConfig,
    ValidationError,
    apply_filter_log,
    evaluate_session,
    generate_synthetic,
    load_history,
    load_session,
    load_spec,
    new_session,
    parse_filter,
    save_session,
    save_spec,
    write_history,
)
from rankforge.data_io import history_columns

from conftest import NOISELESS_COEFS


def synth_config(spec, seed=42, sigma=0.5, n_rankees=12, n_years=4):
    return SyntheticConfig(
        spec=spec,
        n_rankees=n_rankees,
        n_years=n_years,
        coefficients=NOISELESS_COEFS,
        noise_sigma=sigma,
        seed=seed,
    )


class TestGenerateSynthetic:
    def test_deterministic_per_seed(self, small_spec):
        a = generate_synthetic(synth_config(small_spec, seed=42))
        b = generate_synthetic(synth_config(small_spec, seed=42))
        assert a.rows == b.rows
        c = generate_synthetic(synth_config(small_spec, seed=43))
        assert a.rows != c.rows

    def test_noiseless_scores_equal_linear_form(self, small_spec):
        table = generate_synthetic(synth_config(small_spec, sigma=0.0))
        for r in table.rows:
            for ind in small_spec.indicators:
                coefs = NOISELESS_COEFS[ind.id]
                linear = coefs["intercept"] + sum(
                    coefs[a] * r.attribute_values[a] for a in ind.attribute_group
                )
                assert r.indicator_scores[ind.id] == pytest.approx(
                    small_spec.clamp(linear), abs=1e-12
                )

    def test_per_year_ranks_are_valid_competition_ranking(self, small_spec):
        table = generate_synthetic(synth_config(small_spec))
        years = {r.year for r in table.rows}
        for year in years:
            rows = [r for r in table.rows if r.year == year]
            for r in rows:
                expected = 1 + sum(1 for o in rows if o.final_score > r.final_score)
                assert r.rank == expected

    def test_attributes_stay_in_domain(self, small_spec):
        table = generate_synthetic(synth_config(small_spec, n_rankees=40, n_years=6))
        for r in table.rows:
            for attr in small_spec.attributes:
                assert attr.domain_min <= r.attribute_values[attr.id] <= attr.domain_max

    def test_synthetic_passes_ingestion_validation(self, small_spec, tmp_path):
        table = generate_synthetic(synth_config(small_spec))
        path = tmp_path / "h.csv"
        write_history(table, path, small_spec)
        loaded = load_history(path, small_spec)
        assert len(loaded.rows) == len(table.rows)

    def test_config_validation(self, small_spec):
        with pytest.raises(ValidationError):
            synth_config(small_spec, n_rankees=0)
        with pytest.raises(ValidationError):
            SyntheticConfig(
                spec=small_spec,
                n_rankees=3,
                n_years=2,
                coefficients={"i1": NOISELESS_COEFS["i1"]},
                noise_sigma=0.0,
                seed=1,
            )


class TestHistoryCsv:
    def test_round_trip_is_byte_identical(self, small_spec, tmp_path):
        table = generate_synthetic(synth_config(small_spec))
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        write_history(table, first, small_spec)
        write_history(load_history(first, small_spec), second, small_spec)
        assert first.read_bytes() == second.read_bytes()

    def test_header_only_file_yields_empty_table(self, small_spec, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(history_columns(small_spec)) + "\n", encoding="utf-8")
        table = load_history(path, small_spec)
        assert table.rows == ()
        assert table.provenance["row_count"] == 0

    def test_header_mismatch_rejected(self, small_spec, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("rankee_id,year,wrong\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="header"):
            load_history(path, small_spec)

    def test_out_of_bounds_score_names_row(self, small_spec, tmp_path):
        cols = history_columns(small_spec)
        good = "R1,2024,10.0,10.0,10.0,50.0,50.0,50.0,2"
        bad = "R2,2024,10.0,10.0,10.0,50.0,50.0,101.0,1"
        path = tmp_path / "bounds.csv"
        path.write_text(",".join(cols) + "\n" + good + "\n" + bad + "\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="final score") as err:
            load_history(path, small_spec)
        assert "3" in err.value.location  # second data row = file line 3

    def test_unparsable_value_names_row_and_column(self, small_spec, tmp_path):
        cols = history_columns(small_spec)
        row = "R1,2024,oops,10.0,10.0,50.0,50.0,50.0,1"
        path = tmp_path / "parse.csv"
        path.write_text(",".join(cols) + "\n" + row + "\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="attr_a1"):
            load_history(path, small_spec)

    def test_duplicate_rankee_year_rejected(self, small_spec, tmp_path):
        cols = history_columns(small_spec)
        row = "R1,2024,10.0,10.0,10.0,50.0,50.0,50.0,1"
        path = tmp_path / "dup.csv"
        path.write_text(",".join(cols) + "\n" + row + "\n" + row + "\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="duplicate"):
            load_history(path, small_spec)

    def test_gap_years_flagged_not_rejected(self, small_spec):
        def rec(year):
            return RankeeRecord(
                rankee_id="R1",
                year=year,
                attribute_values={a: 10.0 for a in small_spec.attribute_ids},
                indicator_scores={i: 50.0 for i in small_spec.indicator_ids},
                final_score=50.0,
                rank=1,
            )

        table = HistoryTable.build([rec(2020), rec(2023)], source="test")
        assert table.gaps == (("R1", (2021, 2022)),)


class TestSpecJson:
    def test_round_trip(self, small_spec, tmp_path):
        path = tmp_path / "spec.json"
        save_spec(small_spec, path)
        assert load_spec(path) == small_spec

    def test_corrupt_json_reports_offset(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"attributes": [', encoding="utf-8")
        with pytest.raises(SchemaError, match="byte"):
            load_spec(path)


class TestSession:
    @pytest.fixture
    def session(self, small_spec, noiseless_table, noiseless_model, baseline):
        return new_session(
            session_id="s-test",
            spec=small_spec,
            baseline=baseline,
            model=noiseless_model,
            ranges=[AttributeRange("a1", (20.0, 40.0, 60.0)), AttributeRange("a2", (30.0, 50.0))],
            rivals={"R02": noiseless_table.for_rankee("R02")},
        )

    def test_round_trip_preserves_document(self, session, tmp_path):
        path = tmp_path / "session.json"
        save_session(session, path)
        loaded = load_session(path)
        assert loaded.to_dict() == session.to_dict()

    def test_replay_reproduces_filtered_counts(self, session, tmp_path):
        session.filter_log.append(parse_filter("ind:i1 mean>0"))
        session.filter_log.append(parse_filter("attr:a1 mean<=20"))
        scenarios = evaluate_session(session)
        before = len(apply_filter_log(session, scenarios))

        path = tmp_path / "session.json"
        save_session(session, path)
        loaded = load_session(path)
        replayed = apply_filter_log(loaded, evaluate_session(loaded))
        assert len(replayed) == before
        assert [s.scenario_id for s in replayed] == [
            s.scenario_id for s in apply_filter_log(session, scenarios)
        ]

    def test_scenario_regeneration_is_bit_stable(self, session):
        a = evaluate_session(session)
        b = evaluate_session(session)
        for sa, sb in zip(a, b):
            assert np.array_equal(sa.final_prediction.members, sb.final_prediction.members)
            assert sa.rank_distribution == sb.rank_distribution

    def test_corrupt_json_reports_byte_offset(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"version": 1, "oops', encoding="utf-8")
        with pytest.raises(SchemaError, match="byte"):
            load_session(path)

    def test_version_mismatch_is_migration_error(self, session, tmp_path):
        path = tmp_path / "v2.json"
        doc = session.to_dict()
        doc["version"] = 99
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(SessionError, match="version"):
            load_session(path)
