from pathlib import Path

import numpy as np
import pytest

from anonforge.dataset import (
    AttributeSchema,
    Dataset,
    Record,
    load_adult_csv,
    sample_rows,
)
from anonforge.hierarchy import Hierarchy, load_hierarchy_dir

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

COUNTRY_TREE = {
    "*": {
        "America": {"United-States": {}, "Canada": {}},
        "Asia": {"India": {}, "Japan": {}},
    }
}


def toy_schema():
    return (
        AttributeSchema("age", "numeric", "quasi_identifier"),
        AttributeSchema("country", "categorical", "quasi_identifier"),
        AttributeSchema("label", "categorical", "sensitive"),
    )


def toy_dataset(rows):
    """rows: [(age, country, label), ...]"""
    return Dataset(toy_schema(), [Record(tuple(r)) for r in rows])


@pytest.fixture
def country_tree():
    return Hierarchy("country", COUNTRY_TREE)


@pytest.fixture
def toy4(country_tree):
    d = toy_dataset([
        (20.0, "United-States", "a"),
        (30.0, "Canada", "b"),
        (40.0, "India", "a"),
        (60.0, "Japan", "b"),
    ])
    return d, {"country": country_tree}


@pytest.fixture(scope="session")
def adult_full():
    with open(DATA_DIR / "adult_sample.csv", "rb") as fh:
        return load_adult_csv(fh, complete_only=True)


@pytest.fixture(scope="session")
def adult_trees(adult_full):
    cats = [a.name for a in adult_full.schema
            if a.role == "quasi_identifier" and a.kind == "categorical"]
    return load_hierarchy_dir(str(DATA_DIR / "hierarchies"), cats)


@pytest.fixture(scope="session")
def adult500(adult_full):
    return sample_rows(adult_full, 500, 0)


@pytest.fixture(scope="session")
def adult3000(adult_full):
    return sample_rows(adult_full, 3000, 0)


@pytest.fixture(scope="session")
def adult60(adult_full):
    return sample_rows(adult_full, 60, 0)


def random_toy_problem(rng: np.random.Generator, n: int = None):
    """Small random dataset with 1 numeric + 1 categorical QI for oracles."""
    if n is None:
        n = int(rng.integers(4, 9))
    leaves = ["United-States", "Canada", "India", "Japan"]
    rows = [
        (float(rng.integers(0, 100)), leaves[int(rng.integers(0, 4))],
         ["x", "y"][int(rng.integers(0, 2))])
        for _ in range(n)
    ]
    return toy_dataset(rows), {"country": Hierarchy("country", COUNTRY_TREE)}


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks for ties."""

    def ranks(vals):
        order = np.argsort(vals, kind="stable")
        r = np.empty(len(vals), dtype=np.float64)
        i = 0
        while i < len(vals):
            j = i
            while j + 1 < len(vals) and vals[order[j + 1]] == vals[order[i]]:
                j += 1
            avg = (i + j) / 2.0 + 1.0
            for t in range(i, j + 1):
                r[order[t]] = avg
            i = j + 1
        return r

    rx, ry = ranks(np.asarray(xs)), ranks(np.asarray(ys))
    rx -= rx.mean()
    ry -= ry.mean()
    denom = float(np.sqrt((rx @ rx) * (ry @ ry)))
    return float(rx @ ry) / denom if denom else 0.0
