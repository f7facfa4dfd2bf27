import pytest

from anonforge.dataset import (
    ADULT_SCHEMA,
    AttributeSchema,
    adult_preprocess,
    load_adult_csv,
    load_csv,
    sample_rows,
    schema_from_json,
)
from anonforge.errors import (
    EmptyDatasetError,
    ParseError,
    RangeError,
    SchemaError,
)

TWO_COL = (
    AttributeSchema("age", "numeric", "quasi_identifier"),
    AttributeSchema("sex", "categorical", "sensitive"),
)


def test_load_csv_basic():
    d = load_csv("age,sex\n30,Male\n20,Female\n45,Male\n", TWO_COL)
    assert len(d) == 3
    assert d.numeric_ranges["age"] == (20.0, 45.0)
    assert d.records[0].values == (30.0, "Male")


def test_complete_only_drops_missing_rows():
    text = "age,sex\n30,Male\n?,Female\n45,Male\n50,Female\n"
    d = load_csv(text, TWO_COL, complete_only=True)
    assert len(d) == 3
    kept = load_csv(text, TWO_COL, complete_only=False)
    assert len(kept) == 4
    assert kept.records[1][0] is None


def test_empty_cell_counts_as_missing():
    d = load_csv("age,sex\n30,Male\n40,\n", TWO_COL, complete_only=True)
    assert len(d) == 1


def test_header_missing_schema_column():
    with pytest.raises(SchemaError):
        load_csv("age\n30\n", TWO_COL)


def test_extra_columns_are_ignored():
    d = load_csv("junk,age,sex\nx,30,Male\n", TWO_COL)
    assert d.records[0].values == (30.0, "Male")


def test_unparseable_numeric_cell():
    with pytest.raises(ParseError) as exc:
        load_csv("age,sex\nthirty,Male\n", TWO_COL)
    assert exc.value.row == 0
    assert exc.value.column == "age"


def test_empty_after_filtering():
    with pytest.raises(EmptyDatasetError):
        load_csv("age,sex\n?,Male\n", TWO_COL, complete_only=True)


def test_load_csv_deterministic():
    text = "age,sex\n30,Male\n20,Female\n"
    d1 = load_csv(text, TWO_COL)
    d2 = load_csv(text.encode(), TWO_COL)
    assert [r.values for r in d1.records] == [r.values for r in d2.records]
    assert d1.numeric_ranges == d2.numeric_ranges


def test_numeric_range_invariant(adult_full):
    for name, (lo, hi) in adult_full.numeric_ranges.items():
        col = adult_full.column(name)
        assert all(lo <= v <= hi for v in col if v is not None)


def test_schema_duplicate_names_rejected():
    with pytest.raises(SchemaError):
        schema_from_json({"attributes": [
            {"name": "a", "kind": "numeric", "role": "sensitive"},
            {"name": "a", "kind": "numeric", "role": "quasi_identifier"},
        ]})


def test_adult_preprocess_column_set(adult_full):
    # adult_full is already preprocessed by the loader fixture
    assert [a.name for a in adult_full.schema] == [a.name for a in ADULT_SCHEMA]
    kinds = {a.name: a.kind for a in adult_full.schema}
    assert kinds["age"] == "numeric"
    assert kinds["education_num"] == "numeric"
    assert kinds["hours-per-week"] == "numeric"
    assert sum(k == "categorical" for k in kinds.values()) == 8


def test_adult_preprocess_rejects_preprocessed_input(adult_full):
    with pytest.raises(SchemaError):
        adult_preprocess(adult_full)


def test_adult_preprocess_preserves_row_count():
    from tests.conftest import DATA_DIR

    with open(DATA_DIR / "adult_sample.csv", "rb") as fh:
        raw = load_adult_csv(fh, complete_only=False, preprocess=False)
    processed = adult_preprocess(raw)
    assert len(processed) == len(raw) == 5000


def test_sample_rows_identity(adult60):
    same = sample_rows(adult60, len(adult60), 0)
    assert [r.values for r in same.records] == [r.values for r in adult60.records]


def test_sample_rows_head(adult_full):
    d = sample_rows(adult_full, 500, 0)
    assert len(d) == 500
    assert [r.values for r in d.records] == [r.values for r in adult_full.records[:500]]


def test_sample_rows_seeded_deterministic(adult_full):
    a = sample_rows(adult_full, 100, seed=42)
    b = sample_rows(adult_full, 100, seed=42)
    assert [r.values for r in a.records] == [r.values for r in b.records]
    c = sample_rows(adult_full, 100, seed=43)
    assert [r.values for r in a.records] != [r.values for r in c.records]


def test_sample_rows_too_many(adult60):
    with pytest.raises(RangeError):
        sample_rows(adult60, 61, 0)
