"""Turn (raw or anonymized) datasets into supervised-learning problems and
score them: target extraction, fold-aware encoding, native classifier
training, stratified cross-validation, and the standard metric set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import defaults
from .anonymizer import AnonymizedDataset, Interval
from .classifiers import (
    GradientBoostingStumps,
    LinearSVCSubgradient,
    LogisticRegressionGD,
    RandomForestGini,
)
from .dataset import Dataset
from .errors import EvalError, SchemaError
from .hierarchy import HierarchyNode

TARGETS = ("income", "education", "marital_status")
TARGET_COLUMNS = {
    "income": "income",
    "education": "education_num",
    "marital_status": "marital-status",
}

CLASSIFIER_KINDS = (
    "logistic_regression",
    "linear_svc",
    "random_forest",
    "gradient_boosting",
)


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise EvalError(f"unknown classifier kind {self.kind!r}")
        unknown = set(self.hyperparams) - set(defaults.CLASSIFIER_DEFAULTS[self.kind])
        if unknown:
            raise EvalError(f"unknown hyperparams for {self.kind}: {sorted(unknown)}")

    def resolved(self) -> dict:
        merged = dict(defaults.CLASSIFIER_DEFAULTS[self.kind])
        merged.update(self.hyperparams)
        return merged


def build_model(spec: ClassifierSpec):
    hp = spec.resolved()
    if spec.kind == "logistic_regression":
        return LogisticRegressionGD(hp["learning_rate"], hp["epochs"], hp["l2"])
    if spec.kind == "linear_svc":
        return LinearSVCSubgradient(hp["learning_rate"], hp["epochs"], hp["l2"])
    if spec.kind == "random_forest":
        return RandomForestGini(
            hp["n_trees"], hp["max_depth"], hp["bootstrap_fraction"],
            hp["max_features"], hp["min_samples_split"], seed=spec.seed,
        )
    return GradientBoostingStumps(hp["n_stumps"], hp["shrinkage"], seed=spec.seed)


# ---------------------------------------------------------------------------
# Feature tables and targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureColumn:
    name: str
    kind: str  # numeric | categorical


@dataclass(frozen=True)
class FeatureTable:
    """Column-typed cells: numbers, Intervals, or category labels."""

    columns: tuple[FeatureColumn, ...]
    rows: list[tuple]

    def subset(self, idx: Sequence[int]) -> "FeatureTable":
        return FeatureTable(self.columns, [self.rows[i] for i in idx])


@dataclass(frozen=True)
class GeneralizedTable:
    """Parsed form of an exported anonymized CSV (intervals + labels)."""

    columns: tuple[FeatureColumn, ...]
    rows: list[tuple]


_INTERVAL_RE = re.compile(
    r"^(-?\d+(?:\.\d+)?(?:e-?\d+)?)-(-?\d+(?:\.\d+)?(?:e-?\d+)?)$"
)


def parse_generalized_cell(text: str, kind: str):
    """Inverse of the export rendering for one cell."""
    if kind == "categorical":
        return text
    m = _INTERVAL_RE.match(text)
    if m:
        return Interval(float(m.group(1)), float(m.group(2)))
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"cannot parse numeric cell {text!r}") from None


def load_generalized_csv(text: str, schema) -> GeneralizedTable:
    """Read an exported anonymized CSV back into typed cells."""
    import csv as _csv
    import io as _io

    reader = _csv.reader(_io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("exported CSV has no header row") from None
    kinds = {a.name: a.kind for a in schema}
    missing = [h for h in header if h not in kinds]
    if missing:
        raise SchemaError(f"exported CSV has columns not in the schema: {missing}")
    columns = tuple(FeatureColumn(h, kinds[h]) for h in header)
    rows = []
    for row in reader:
        if not row:
            continue
        rows.append(tuple(
            parse_generalized_cell(cell.strip(), col.kind)
            for cell, col in zip(row, columns)
        ))
    return GeneralizedTable(columns, rows)


def _cells_of(data) -> tuple[list[FeatureColumn], list[list]]:
    """Common tabular view over Dataset and AnonymizedDataset."""
    if isinstance(data, GeneralizedTable):
        return list(data.columns), [list(r) for r in data.rows]
    if isinstance(data, Dataset):
        cols = [
            FeatureColumn(a.name, a.kind)
            for a in data.schema
            if a.role != "excluded"
        ]
        idxs = [data.attribute_index(c.name) for c in cols]
        rows = [[r[i] for i in idxs] for r in data.records]
        return cols, rows
    if isinstance(data, AnonymizedDataset):
        names = data.qi_names + [data.sensitive_name]
        kinds = {a.name: a.kind for a in data.schema}
        cols = [FeatureColumn(n, kinds[n]) for n in names]
        rows = [[row[n] for n in names] for row in data.generalized_rows()]
        return cols, rows
    raise SchemaError(f"cannot evaluate object of type {type(data).__name__}")


def _as_number(cell) -> float:
    if isinstance(cell, Interval):
        return (cell.lo + cell.hi) / 2.0
    if cell is None:
        raise EvalError("missing value in a numeric column")
    return float(cell)


def _as_label(cell) -> str:
    if isinstance(cell, HierarchyNode):
        return "*" if cell.index == 0 else cell.label
    if cell is None:
        raise EvalError("missing value in a categorical column")
    return str(cell)


def education_class(education_num: float) -> int:
    for cls, upper in enumerate(defaults.EDUCATION_BIN_UPPER_EDGES):
        if education_num <= upper:
            return cls
    return len(defaults.EDUCATION_BIN_UPPER_EDGES)


def make_target(data, which: str) -> tuple[list, FeatureTable]:
    """Labels plus the remaining feature columns for one prediction target."""
    if which not in TARGETS:
        raise SchemaError(f"unknown target {which!r}; expected one of {TARGETS}")
    column = TARGET_COLUMNS[which]
    cols, rows = _cells_of(data)
    names = [c.name for c in cols]
    if column not in names:
        raise SchemaError(f"target column {column!r} is not present")
    ti = names.index(column)

    labels: list = []
    for row in rows:
        cell = row[ti]
        if which == "income":
            text = _as_label(cell)
            if text == ">50K":
                labels.append(1)
            elif text == "<=50K":
                labels.append(0)
            else:
                raise SchemaError(f"unexpected income label {text!r}")
        elif which == "education":
            labels.append(education_class(_as_number(cell)))
        else:
            labels.append(_as_label(cell))

    feat_cols = tuple(c for i, c in enumerate(cols) if i != ti)
    feat_rows = [tuple(v for i, v in enumerate(row) if i != ti) for row in rows]
    return labels, FeatureTable(feat_cols, feat_rows)


class Encoder:
    """Numeric matrix encoding fitted on a training fold.

    Numeric cells pass through (intervals as midpoints); categorical cells
    one-hot over the labels observed at fit time, all-zeros when unseen.
    """

    def fit(self, table: FeatureTable) -> "Encoder":
        self.columns = table.columns
        self.categories: dict[str, list[str]] = {}
        for j, col in enumerate(table.columns):
            if col.kind == "categorical":
                self.categories[col.name] = sorted(
                    {_as_label(row[j]) for row in table.rows}
                )
        return self

    def transform(self, table: FeatureTable) -> np.ndarray:
        if tuple(table.columns) != tuple(self.columns):
            raise EvalError("feature table does not match the fitted schema")
        blocks = []
        for j, col in enumerate(self.columns):
            if col.kind == "numeric":
                blocks.append(
                    np.asarray([_as_number(r[j]) for r in table.rows])[:, None]
                )
            else:
                cats = self.categories[col.name]
                pos = {c: i for i, c in enumerate(cats)}
                block = np.zeros((len(table.rows), len(cats)))
                for i, r in enumerate(table.rows):
                    p = pos.get(_as_label(r[j]))
                    if p is not None:
                        block[i, p] = 1.0
                blocks.append(block)
        return np.hstack(blocks) if blocks else np.zeros((len(table.rows), 0))

    def fit_transform(self, table: FeatureTable) -> np.ndarray:
        return self.fit(table).transform(table)


def encode(features: FeatureTable) -> np.ndarray:
    """One-shot encoding (fit and transform on the same rows)."""
    return Encoder().fit_transform(features)


# ---------------------------------------------------------------------------
# Training, metrics, cross-validation
# ---------------------------------------------------------------------------


def train_predict(spec: ClassifierSpec, X_train, y_train, X_test) -> np.ndarray:
    """Fit one model and predict; constant-label training predicts that label."""
    X_train = np.asarray(X_train, dtype=np.float64)
    X_test = np.asarray(X_test, dtype=np.float64)
    if len(X_train) == 0:
        raise EvalError("empty training set")
    if X_train.shape[1] != X_test.shape[1]:
        raise EvalError("train and test matrices are not column-aligned")
    model = build_model(spec).fit(X_train, np.asarray(y_train))
    return model.predict(X_test)


@dataclass(frozen=True)
class MetricsFragment:
    accuracy: float
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float
    flags: tuple[str, ...]


def metrics(predicted, actual) -> MetricsFragment:
    predicted = list(predicted)
    actual = list(actual)
    if len(predicted) != len(actual):
        raise EvalError(
            f"length mismatch: {len(predicted)} predictions, {len(actual)} labels"
        )
    if not actual:
        raise EvalError("cannot score an empty label set")
    classes = sorted(set(actual) | set(predicted), key=str)
    n = len(actual)
    correct = sum(p == a for p, a in zip(predicted, actual))
    per_class = {}
    flags: list[str] = []
    for cls in classes:
        tp = sum(p == cls and a == cls for p, a in zip(predicted, actual))
        fp = sum(p == cls and a != cls for p, a in zip(predicted, actual))
        fn = sum(p != cls and a == cls for p, a in zip(predicted, actual))
        if tp + fp == 0:
            precision = 0.0
            flags.append(f"zero_precision_denominator:{cls}")
        else:
            precision = tp / (tp + fp)
        if tp + fn == 0:
            recall = 0.0
            flags.append(f"zero_recall_denominator:{cls}")
        else:
            recall = tp / (tp + fn)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        per_class[cls] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": sum(a == cls for a in actual),
        }
    macro = {
        m: sum(per_class[c][m] for c in classes) / len(classes)
        for m in ("precision", "recall", "f1")
    }
    return MetricsFragment(
        accuracy=correct / n,
        per_class=per_class,
        macro_precision=macro["precision"],
        macro_recall=macro["recall"],
        macro_f1=macro["f1"],
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class EvalReport:
    target: str
    classifier: str
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict
    folds: int
    seed: int
    flags: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "classifier": self.classifier,
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_class": {str(k): v for k, v in self.per_class.items()},
            "folds": self.folds,
            "seed": self.seed,
            "flags": list(self.flags),
        }


def _fold_assignment(labels: list, folds: int, seed: int) -> tuple[np.ndarray, bool]:
    """Fold id per record: stratified when every class has >= folds members."""
    rng = np.random.default_rng(seed)
    n = len(labels)
    assignment = np.zeros(n, dtype=np.int64)
    classes, counts = np.unique(np.asarray(labels, dtype=object), return_counts=True)
    stratified = bool(counts.min() >= folds)
    if stratified:
        arr = np.asarray(labels, dtype=object)
        for cls in classes:
            idx = np.flatnonzero(arr == cls)
            idx = idx[rng.permutation(len(idx))]
            for pos, rec in enumerate(idx):
                assignment[rec] = pos % folds
    else:
        perm = rng.permutation(n)
        for pos, rec in enumerate(perm):
            assignment[rec] = pos % folds
    return assignment, stratified


def cross_validate(
    spec: ClassifierSpec,
    data,
    target: str,
    folds: int = defaults.DEFAULT_FOLDS,
    seed: int = 0,
) -> EvalReport:
    """Stratified k-fold evaluation with per-fold metric averaging."""
    labels, table = make_target(data, target)
    if folds < 2:
        raise EvalError("folds must be >= 2")
    if len(labels) < folds:
        raise EvalError(f"{len(labels)} records cannot fill {folds} folds")
    assignment, stratified = _fold_assignment(labels, folds, seed)
    flags: list[str] = [] if stratified else ["nonstratified_folds"]

    frags: list[MetricsFragment] = []
    labels_arr = np.asarray(labels, dtype=object)
    for fold in range(folds):
        test_idx = np.flatnonzero(assignment == fold)
        train_idx = np.flatnonzero(assignment != fold)
        enc = Encoder().fit(table.subset(train_idx))
        X_train = enc.transform(table.subset(train_idx))
        X_test = enc.transform(table.subset(test_idx))
        y_train = labels_arr[train_idx]
        if len(set(y_train)) == 1:
            flags.append(f"degenerate_training_fold:{fold}")
        predicted = train_predict(spec, X_train, y_train, X_test)
        frags.append(metrics(list(predicted), list(labels_arr[test_idx])))

    acc = float(np.mean([f.accuracy for f in frags]))
    macro_p = float(np.mean([f.macro_precision for f in frags]))
    macro_r = float(np.mean([f.macro_recall for f in frags]))
    macro_f1 = float(np.mean([f.macro_f1 for f in frags]))
    per_class: dict = {}
    all_classes = sorted({c for f in frags for c in f.per_class}, key=str)
    for cls in all_classes:
        present = [f.per_class[cls] for f in frags if cls in f.per_class]
        per_class[cls] = {
            m: float(np.mean([p[m] for p in present]))
            for m in ("precision", "recall", "f1")
        }
        per_class[cls]["support"] = int(sum(p["support"] for p in present))
    for f in frags:
        flags.extend(f.flags)
    return EvalReport(
        target=target,
        classifier=spec.kind,
        accuracy=acc,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        per_class=per_class,
        folds=folds,
        seed=seed,
        flags=tuple(dict.fromkeys(flags)),
    )
