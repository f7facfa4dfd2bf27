"""Typed tabular datasets: CSV ingestion, Adult preprocessing, row sampling.

A Dataset is an immutable container of parsed rows plus per-attribute
metadata; numeric ranges over the whole table are precomputed because they
are the denominators of the information-loss terms.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDatasetError, ParseError, RangeError, SchemaError

KINDS = ("numeric", "categorical")
ROLES = ("quasi_identifier", "sensitive", "excluded")

MISSING_TOKENS = ("?", "")

Cell = float | str | None


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute: its name, value kind, and anonymization role."""

    name: str
    kind: str
    role: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown kind {self.kind!r} for attribute {self.name!r}")
        if self.role not in ROLES:
            raise SchemaError(f"unknown role {self.role!r} for attribute {self.name!r}")


def validate_schema(attributes: Sequence[AttributeSchema], for_run: bool = False) -> None:
    """Check schema-level invariants; `for_run` additionally requires the
    QI/sensitive structure an anonymization run needs."""
    names = [a.name for a in attributes]
    if len(set(names)) != len(names):
        raise SchemaError("attribute names must be unique within a schema")
    if for_run:
        n_qi = sum(a.role == "quasi_identifier" for a in attributes)
        n_sens = sum(a.role == "sensitive" for a in attributes)
        if n_qi < 1:
            raise SchemaError("an anonymization run needs at least one quasi_identifier")
        if n_sens != 1:
            raise SchemaError("an anonymization run needs exactly one sensitive attribute")


def schema_from_json(obj: dict) -> tuple[AttributeSchema, ...]:
    try:
        attrs = tuple(
            AttributeSchema(a["name"], a["kind"], a["role"]) for a in obj["attributes"]
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed schema object: {exc}") from exc
    validate_schema(attrs)
    return attrs


def load_schema(path_or_io) -> tuple[AttributeSchema, ...]:
    if hasattr(path_or_io, "read"):
        obj = json.load(path_or_io)
    else:
        with open(path_or_io, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    return schema_from_json(obj)


@dataclass(frozen=True)
class Record:
    """One row; cell order matches the owning dataset's schema order."""

    values: tuple[Cell, ...]

    def __getitem__(self, i: int) -> Cell:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


class Dataset:
    """Immutable parsed table with schema and numeric range metadata."""

    def __init__(self, schema: Sequence[AttributeSchema], records: Sequence[Record]):
        validate_schema(schema)
        self.schema: tuple[AttributeSchema, ...] = tuple(schema)
        self.records: tuple[Record, ...] = tuple(records)
        for r in self.records:
            if len(r) != len(self.schema):
                raise SchemaError(
                    f"record has {len(r)} cells, schema has {len(self.schema)} attributes"
                )
        self._index = {a.name: i for i, a in enumerate(self.schema)}
        self.numeric_ranges: dict[str, tuple[float, float]] = {}
        for i, attr in enumerate(self.schema):
            if attr.kind != "numeric":
                continue
            vals = [r[i] for r in self.records if r[i] is not None]
            if vals:
                self.numeric_ranges[attr.name] = (float(min(vals)), float(max(vals)))

    def __len__(self) -> int:
        return len(self.records)

    def attribute_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"no attribute named {name!r}") from None

    def attribute(self, name: str) -> AttributeSchema:
        return self.schema[self.attribute_index(name)]

    def column(self, name: str) -> list[Cell]:
        i = self.attribute_index(name)
        return [r[i] for r in self.records]

    def qi_names(self) -> list[str]:
        return [a.name for a in self.schema if a.role == "quasi_identifier"]

    def sensitive_name(self) -> str:
        sens = [a.name for a in self.schema if a.role == "sensitive"]
        if len(sens) != 1:
            raise SchemaError("dataset does not have exactly one sensitive attribute")
        return sens[0]

    def has_missing(self, names: Iterable[str] | None = None) -> bool:
        idxs = (
            range(len(self.schema))
            if names is None
            else [self.attribute_index(n) for n in names]
        )
        return any(r[i] is None for r in self.records for i in idxs)


def _coerce_text(source) -> io.StringIO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise TypeError("source must be bytes, str, or a file object")


def load_csv(source, schema: Sequence[AttributeSchema], complete_only: bool = False) -> Dataset:
    """Parse a header-first CSV into a Dataset.

    Cells equal to "?" or empty are missing; rows containing a missing cell
    in any schema column are dropped iff `complete_only`. The header must
    cover every schema name (extra columns are ignored).
    """
    validate_schema(schema)
    reader = csv.reader(_coerce_text(source), skipinitialspace=True)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("CSV has no header row") from None
    header = [h.strip() for h in header]
    positions = {}
    for attr in schema:
        if attr.name not in header:
            raise SchemaError(f"CSV header is missing schema column {attr.name!r}")
        positions[attr.name] = header.index(attr.name)

    records: list[Record] = []
    for row_no, row in enumerate(reader):
        if not row or all(c.strip() == "" for c in row):
            continue
        cells: list[Cell] = []
        complete = True
        for attr in schema:
            pos = positions[attr.name]
            raw = row[pos].strip() if pos < len(row) else ""
            if raw in MISSING_TOKENS:
                cells.append(None)
                complete = False
                continue
            if attr.kind == "numeric":
                try:
                    val = float(raw)
                except ValueError:
                    raise ParseError(
                        f"cannot parse {raw!r} as a number (row {row_no}, column {attr.name})",
                        row=row_no,
                        column=attr.name,
                    ) from None
                if not np.isfinite(val):
                    raise ParseError(
                        f"non-finite numeric value in row {row_no}, column {attr.name}",
                        row=row_no,
                        column=attr.name,
                    )
                cells.append(val)
            else:
                cells.append(raw)
        if complete_only and not complete:
            continue
        records.append(Record(tuple(cells)))

    if not records:
        raise EmptyDatasetError("no records remain after parsing/filtering")
    return Dataset(schema, records)


# Standard UCI Adult column layout. The four attributes dropped by
# preprocessing are marked excluded; income is the sensitive attribute.
ADULT_RAW_SCHEMA: tuple[AttributeSchema, ...] = (
    AttributeSchema("age", "numeric", "quasi_identifier"),
    AttributeSchema("workclass", "categorical", "quasi_identifier"),
    AttributeSchema("fnlwgt", "numeric", "excluded"),
    AttributeSchema("education", "categorical", "excluded"),
    AttributeSchema("education_num", "numeric", "quasi_identifier"),
    AttributeSchema("marital-status", "categorical", "quasi_identifier"),
    AttributeSchema("occupation", "categorical", "quasi_identifier"),
    AttributeSchema("relationship", "categorical", "quasi_identifier"),
    AttributeSchema("race", "categorical", "quasi_identifier"),
    AttributeSchema("sex", "categorical", "quasi_identifier"),
    AttributeSchema("capital-gain", "numeric", "excluded"),
    AttributeSchema("capital-loss", "numeric", "excluded"),
    AttributeSchema("hours-per-week", "numeric", "quasi_identifier"),
    AttributeSchema("native-country", "categorical", "quasi_identifier"),
    AttributeSchema("income", "categorical", "sensitive"),
)

ADULT_DROPPED = ("capital-gain", "capital-loss", "fnlwgt", "education")

ADULT_SCHEMA: tuple[AttributeSchema, ...] = tuple(
    a for a in ADULT_RAW_SCHEMA if a.name not in ADULT_DROPPED
)

# The UCI header spells it education-num; the processed schema uses the
# underscore form throughout.
_ADULT_HEADER_ALIASES = {"education-num": "education_num"}


def normalize_adult_header(names: Sequence[str]) -> list[str]:
    return [_ADULT_HEADER_ALIASES.get(n, n) for n in names]


def adult_preprocess(raw: Dataset) -> Dataset:
    """Drop the four excluded Adult columns, keeping the canonical 11."""
    raw_names = {a.name for a in raw.schema}
    expected = {a.name for a in ADULT_RAW_SCHEMA}
    if raw_names != expected:
        missing = sorted(expected - raw_names)
        extra = sorted(raw_names - expected)
        raise SchemaError(
            f"not a standard 15-column Adult table (missing: {missing}, unexpected: {extra})"
        )
    keep = [raw.attribute_index(a.name) for a in ADULT_SCHEMA]
    records = [Record(tuple(r[i] for i in keep)) for r in raw.records]
    return Dataset(ADULT_SCHEMA, records)


def load_adult_csv(source, complete_only: bool = False, preprocess: bool = True) -> Dataset:
    """Load an Adult CSV (UCI or underscore header spelling), optionally
    applying the standard column preprocessing."""
    text = _coerce_text(source).getvalue()
    head, _, rest = text.partition("\n")
    cols = normalize_adult_header([c.strip() for c in head.split(",")])
    raw = load_csv(",".join(cols) + "\n" + rest, ADULT_RAW_SCHEMA, complete_only=complete_only)
    return adult_preprocess(raw) if preprocess else raw


def sample_rows(d: Dataset, n: int, seed: int = 0) -> Dataset:
    """First-n rows when seed==0, otherwise a seeded uniform sample
    (indices kept in file order)."""
    if n > len(d):
        raise RangeError(f"cannot sample {n} rows from a dataset of {len(d)}")
    if seed == 0:
        idx = range(n)
    else:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(d), size=n, replace=False))
    return Dataset(d.schema, [d.records[i] for i in idx])
