"""Record validation, dataset IO, temporal splits, synthetic generation."""

from datetime import date

import numpy as np
import pytest

from selcert import (
    Dataset,
    DatasetIOError,
    DomainError,
    DuplicateIdError,
    MissingDateError,
    PredictionRecord,
    SchemaError,
    SplitSpec,
    SyntheticScorerSpec,
    generate_synthetic,
    load_dataset,
    temporal_split,
    write_dataset,
)


def make_dataset():
    return Dataset(
        records=(
            PredictionRecord("a", 0.91, 1, date(2019, 3, 1), "phase-1"),
            PredictionRecord("b", 0.12, 0, date(2020, 6, 15), "phase-2"),
            PredictionRecord("c", 0.5, 1, date(2021, 1, 1), None),
        ),
        provenance="unit fixture",
    )


class TestPredictionRecord:
    def test_valid(self):
        rec = PredictionRecord("x", 0.25, 0)
        assert rec.score == 0.25 and rec.date is None and rec.group is None

    def test_int_score_coerced(self):
        assert PredictionRecord("x", 1, 1).score == 1.0

    @pytest.mark.parametrize("bad", ["", None, 3])
    def test_bad_id(self, bad):
        with pytest.raises(SchemaError):
            PredictionRecord(bad, 0.5, 1)

    @pytest.mark.parametrize("bad", [-0.01, 1.01, "0.5", True, float("nan")])
    def test_bad_score(self, bad):
        with pytest.raises(SchemaError):
            PredictionRecord("x", bad, 1)

    @pytest.mark.parametrize("bad", [2, -1, 0.0, "1", True])
    def test_bad_label(self, bad):
        with pytest.raises(SchemaError):
            PredictionRecord("x", 0.5, bad)


class TestDataset:
    def test_accessors(self):
        data = make_dataset()
        assert len(data) == 3
        assert data.ids() == ["a", "b", "c"]
        assert np.array_equal(data.scores(), [0.91, 0.12, 0.5])
        assert np.array_equal(data.labels(), [1, 0, 1])
        assert data.by_id()["b"].group == "phase-2"

    def test_duplicate_ids_rejected(self):
        rec = PredictionRecord("a", 0.5, 1)
        with pytest.raises(DuplicateIdError):
            Dataset(records=(rec, rec))

    def test_empty_is_allowed(self):
        assert len(Dataset(records=())) == 0


class TestCsvIO:
    def test_round_trip_exact(self, tmp_path):
        # repr-written scores must reload to the very same floats
        data = make_dataset()
        path = tmp_path / "d.csv"
        write_dataset(data, path)
        back = load_dataset(path)
        assert back.records == data.records

    def test_awkward_float_round_trip(self, tmp_path):
        data = Dataset(records=(PredictionRecord("a", 0.1 + 0.2, 1),))
        path = tmp_path / "d.csv"
        write_dataset(data, path)
        assert load_dataset(path).records[0].score == 0.1 + 0.2

    def test_minimal_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,0.7,1\nr2,0.2,0\n")
        data = load_dataset(path)
        assert len(data) == 2 and data.records[0].date is None

    def test_optional_columns_written_only_when_present(self, tmp_path):
        data = Dataset(records=(PredictionRecord("a", 0.5, 1),))
        path = tmp_path / "d.csv"
        write_dataset(data, path)
        assert path.read_text().splitlines()[0] == "id,score,label"

    def test_rejects_wrong_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,label,score\nr1,1,0.7\n")
        with pytest.raises(SchemaError, match="header"):
            load_dataset(path)

    def test_rejects_group_before_date(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label,group,date\nr1,0.7,1,g,2020-01-01\n")
        with pytest.raises(SchemaError):
            load_dataset(path)

    def test_bad_score_names_row_and_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,0.7,1\nr2,high,0\n")
        with pytest.raises(SchemaError) as err:
            load_dataset(path)
        assert err.value.row == 2 and err.value.column == "score"

    def test_out_of_range_score(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,1.2,1\n")
        with pytest.raises(SchemaError):
            load_dataset(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,0.7,2\n")
        with pytest.raises(SchemaError) as err:
            load_dataset(path)
        assert err.value.column == "label"

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,0.7\n")
        with pytest.raises(SchemaError) as err:
            load_dataset(path)
        assert err.value.row == 1

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label\nr1,0.7,1\nr1,0.2,0\n")
        with pytest.raises(DuplicateIdError):
            load_dataset(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(SchemaError):
            load_dataset(path)

    def test_custom_date_format(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label,date\nr1,0.7,1,15/06/2020\n")
        data = load_dataset(path, date_format="%d/%m/%Y")
        assert data.records[0].date == date(2020, 6, 15)

    def test_bad_date(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,score,label,date\nr1,0.7,1,June 2020\n")
        with pytest.raises(SchemaError) as err:
            load_dataset(path)
        assert err.value.column == "date"

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetIOError):
            load_dataset(tmp_path / "nope.csv")


class TestJsonIO:
    def test_round_trip(self, tmp_path):
        data = make_dataset()
        path = tmp_path / "d.json"
        write_dataset(data, path)
        assert load_dataset(path).records == data.records

    def test_plain_records(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text('[{"id": "r1", "score": 0.7, "label": 1}]')
        data = load_dataset(path)
        assert data.records[0].score == 0.7

    def test_rejects_unknown_key(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text('[{"id": "r1", "score": 0.7, "label": 1, "weight": 2}]')
        with pytest.raises(SchemaError, match="unknown"):
            load_dataset(path)

    def test_rejects_mixed_key_sets(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text(
            '[{"id": "r1", "score": 0.7, "label": 1},'
            ' {"id": "r2", "score": 0.2, "label": 0, "group": "g"}]'
        )
        with pytest.raises(SchemaError, match="key set"):
            load_dataset(path)

    def test_rejects_missing_required_key(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text('[{"id": "r1", "score": 0.7}]')
        with pytest.raises(SchemaError, match="missing"):
            load_dataset(path)

    def test_rejects_non_array(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text('{"id": "r1"}')
        with pytest.raises(SchemaError):
            load_dataset(path)

    def test_rejects_invalid_json(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text("[{")
        with pytest.raises(SchemaError):
            load_dataset(path)

    def test_rejects_boolean_score(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text('[{"id": "r1", "score": true, "label": 1}]')
        with pytest.raises(SchemaError):
            load_dataset(path)


class TestFormatInference:
    def test_explicit_format_wins_over_suffix(self, tmp_path):
        path = tmp_path / "d.dat"
        path.write_text("id,score,label\nr1,0.7,1\n")
        assert len(load_dataset(path, fmt="csv")) == 1

    def test_unknown_suffix_needs_format(self, tmp_path):
        path = tmp_path / "d.dat"
        path.write_text("id,score,label\n")
        with pytest.raises(DomainError):
            load_dataset(path)

    def test_bad_format_name(self, tmp_path):
        with pytest.raises(DomainError):
            load_dataset(tmp_path / "d.csv", fmt="xml")


class TestTemporalSplit:
    def test_boundary_goes_to_test(self):
        data = make_dataset()
        train, test = temporal_split(data, SplitSpec(date(2020, 6, 15)))
        assert train.ids() == ["a"]
        assert test.ids() == ["b", "c"]

    def test_provenance_notes_boundary(self):
        train, test = temporal_split(make_dataset(), SplitSpec(date(2020, 6, 15)))
        assert train.provenance.endswith("[before 2020-06-15]")
        assert test.provenance.endswith("[on or after 2020-06-15]")

    def test_undated_records_rejected(self):
        data = Dataset(records=(PredictionRecord("a", 0.5, 1),))
        with pytest.raises(MissingDateError) as err:
            temporal_split(data, SplitSpec(date(2020, 1, 1)))
        assert err.value.ids == ["a"]

    def test_all_on_one_side(self):
        data = make_dataset()
        train, test = temporal_split(data, SplitSpec(date(2030, 1, 1)))
        assert len(train) == 3 and len(test) == 0


class TestSyntheticGenerator:
    def test_draw_order_contract(self):
        # the stream layout is frozen: labels first from uniform, then
        # positive-class scores in record order, then negative-class scores
        spec = SyntheticScorerSpec(n=50, prevalence=0.4, pos_shape=(3, 2), neg_shape=(2, 3), seed=123)
        data = generate_synthetic(spec)
        rng = np.random.default_rng(123)
        labels = (rng.random(50) < 0.4).astype(int)
        scores = np.empty(50)
        n_pos = int(labels.sum())
        scores[labels == 1] = rng.beta(3, 2, n_pos)
        scores[labels == 0] = rng.beta(2, 3, 50 - n_pos)
        assert np.array_equal(data.labels(), labels)
        assert np.array_equal(data.scores(), scores)

    def test_ids_and_provenance(self):
        data = generate_synthetic(
            SyntheticScorerSpec(n=3, prevalence=0.5, pos_shape=(2, 2), neg_shape=(2, 2), seed=9)
        )
        assert data.ids() == ["syn-0", "syn-1", "syn-2"]
        assert data.provenance == "synthetic(seed=9)"

    def test_same_seed_same_data(self):
        spec = SyntheticScorerSpec(n=20, prevalence=0.5, pos_shape=(8, 2), neg_shape=(2, 8), seed=7)
        assert generate_synthetic(spec).records == generate_synthetic(spec).records

    def test_different_seed_differs(self):
        a = generate_synthetic(SyntheticScorerSpec(5, 0.5, (2, 2), (2, 2), 1))
        b = generate_synthetic(SyntheticScorerSpec(5, 0.5, (2, 2), (2, 2), 2))
        assert not np.array_equal(a.scores(), b.scores())

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=0),
            dict(prevalence=0.0),
            dict(prevalence=1.0),
            dict(pos_shape=(0.0, 1.0)),
            dict(neg_shape=(2.0,)),
            dict(seed="eight"),
        ],
    )
    def test_spec_validation(self, kwargs):
        base = dict(n=10, prevalence=0.5, pos_shape=(2.0, 2.0), neg_shape=(2.0, 2.0), seed=0)
        base.update(kwargs)
        with pytest.raises(DomainError):
            SyntheticScorerSpec(**base)
