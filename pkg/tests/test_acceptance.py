"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its evidence. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import io
import itertools
import math
import time
from csv import reader as csv_reader

import numpy as np
import pytest

from anonforge.anonymizer import (
    Cluster,
    cluster_gil,
    export,
    generalize,
    gil_delta,
    sangreea,
    total_gil,
)
from anonforge.evaluation import ClassifierSpec, cross_validate, make_target, metrics
from anonforge.pipeline import RegimeSpec, SweepConfig, results_csv, run_sweep
from anonforge.session import Session, replay
from anonforge.weights import WeightVector, equal_weights, iml_update
from tests.conftest import random_toy_problem, spearman, toy_dataset
from anonforge.hierarchy import Hierarchy
from tests.conftest import COUNTRY_TREE

K_GRID = (2, 5, 10, 20, 50, 100, 200)
FOUR_CLASSIFIERS = tuple(
    ClassifierSpec(kind, seed=7)
    for kind in ("logistic_regression", "linear_svc", "random_forest",
                 "gradient_boosting")
)


@pytest.fixture(scope="module")
def grid(adult500, adult_trees):
    """Equal-regime anonymizations for the default k grid, timed."""
    w = equal_weights(adult500.qi_names())
    out = {}
    t0 = time.perf_counter()
    for k in K_GRID:
        a = sangreea(adult500, k, adult_trees, w)
        gil = total_gil(a, adult500, adult_trees, w)["normalized"]
        out[k] = (a, gil)
    elapsed = time.perf_counter() - t0
    return out, elapsed


def test_k_anonymity_invariant_over_default_grid(grid):
    """Every distinct QI tuple occurs >= k times, for every k; grid < 2 min."""
    results, elapsed = grid
    violations = 0
    for k, (a, _) in results.items():
        rows = list(csv_reader(io.StringIO(export(a))))
        qi_width = len(rows[0]) - 1
        counts = {}
        for row in rows[1:]:
            key = tuple(row[:qi_width])
            counts[key] = counts.get(key, 0) + 1
        violations += sum(1 for c in counts.values() if c < k)
    assert violations == 0
    assert elapsed < 120.0
    print(f"\n[PASS] k-anonymity invariant: 0 violations over k={K_GRID}, "
          f"grid anonymized in {elapsed:.1f}s (< 120s)")


def test_gil_formula_unit_suite():
    """The three cluster-loss examples, within 1e-9 relative."""
    tree = Hierarchy("country", COUNTRY_TREE)
    trees = {"country": tree}

    d_zero = toy_dataset([(30.0, "Canada", "x"), (30.0, "Canada", "y"),
                          (50.0, "India", "z")])
    cl = Cluster((0, 1), generalize(d_zero, [0, 1], trees))
    b = cluster_gil(d_zero, cl, trees, equal_weights(d_zero.qi_names()))
    assert b.unweighted_total == pytest.approx(0.0, abs=1e-12)

    d_max = toy_dataset([(20.0, "United-States", "x"), (60.0, "India", "y"),
                         (40.0, "Canada", "z")])
    cl = Cluster((0, 1, 2), generalize(d_max, [0, 1, 2], trees))
    b = cluster_gil(d_max, cl, trees, equal_weights(d_max.qi_names()))
    assert b.unweighted_total == pytest.approx(3 * (1 + 1), rel=1e-9)

    d_hand = toy_dataset([(20.0, "India", "x"), (30.0, "United-States", "x"),
                          (40.0, "Canada", "y"), (60.0, "Japan", "y")])
    cl = Cluster((1, 2), generalize(d_hand, [1, 2], trees))
    b = cluster_gil(d_hand, cl, trees, equal_weights(d_hand.qi_names()))
    assert b.per_attribute["age"] == pytest.approx(0.25, rel=1e-9)
    assert b.per_attribute["country"] == pytest.approx(0.5, rel=1e-9)
    assert b.unweighted_total == pytest.approx(1.5, rel=1e-9)
    print("\n[PASS] GIL formula unit suite: zero case, maximal case, "
          "hand-computed 1.5 case (1e-9 rel)")


def test_equal_weight_equivalence(adult500, adult_trees):
    """Weighted total == plain total under all-ones weights, 1e-12 relative,
    over 1,000 random clusters."""
    rng = np.random.default_rng(101)
    w = equal_weights(adult500.qi_names())
    worst = 0.0
    for _ in range(1000):
        size = int(rng.integers(1, 16))
        members = sorted(rng.choice(len(adult500), size=size, replace=False).tolist())
        cl = Cluster(tuple(members), generalize(adult500, members, adult_trees))
        b = cluster_gil(adult500, cl, adult_trees, w)
        denom = max(1.0, abs(b.unweighted_total))
        worst = max(worst, abs(b.weighted_total - b.unweighted_total) / denom)
    assert worst <= 1e-12
    print(f"\n[PASS] equal-weight equivalence: max relative gap {worst:.2e} "
          f"<= 1e-12 over 1000 random clusters")


def test_gil_delta_monotonicity_and_bounds(adult500, adult_trees, grid):
    """gil_delta >= 0 for 10,000 random (cluster, candidate) pairs; every
    grid output's normalized total lies in [0, 1]."""
    rng = np.random.default_rng(202)
    w = equal_weights(adult500.qi_names())
    n = len(adult500)
    min_delta = np.inf
    for _ in range(10_000):
        size = int(rng.integers(1, 9))
        chosen = rng.choice(n, size=size + 1, replace=False)
        members = sorted(chosen[:-1].tolist())
        cand = int(chosen[-1])
        cl = Cluster(tuple(members), generalize(adult500, members, adult_trees))
        delta = gil_delta(adult500, cl, cand, adult_trees, w)
        min_delta = min(min_delta, delta)
        assert delta >= 0.0
    results, _ = grid
    for k, (_, gil) in results.items():
        assert 0.0 <= gil <= 1.0
    print(f"\n[PASS] monotonicity: min delta {min_delta:.3e} >= 0 over 10,000 "
          f"pairs; normalized GIL in [0,1] for all {len(results)} grid outputs")


def _partitions_min_parts(items: tuple, k: int):
    """All set partitions of `items` with every part of size >= k."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for take in range(k - 1, len(rest) + 1):
        for combo in itertools.combinations(rest, take):
            block = (first,) + combo
            remaining = tuple(x for x in rest if x not in combo)
            if remaining and len(remaining) < k:
                continue
            for tail in _partitions_min_parts(remaining, k):
                yield [block] + tail


def _random_partition(rng, n: int, k: int) -> list[tuple]:
    order = rng.permutation(n).tolist()
    parts = []
    while order:
        remaining = len(order)
        sizes = [s for s in range(k, remaining + 1)
                 if remaining - s == 0 or remaining - s >= k]
        size = int(rng.choice(sizes))
        parts.append(tuple(sorted(order[:size])))
        order = order[size:]
    return parts


def test_brute_force_oracle_sandwich():
    """OPT(exhaustive) <= greedy <= mean(random valid partitions) on 50
    random toy instances (n <= 8, k = 2, 2 QIs)."""
    rng = np.random.default_rng(303)
    k = 2
    for trial in range(50):
        d, trees = random_toy_problem(rng)
        w = equal_weights(d.qi_names())

        def partition_cost(parts):
            return sum(
                cluster_gil(d, Cluster(p, generalize(d, p, trees)), trees, w
                            ).weighted_total
                for p in parts
            )

        opt = min(partition_cost(p)
                  for p in _partitions_min_parts(tuple(range(len(d))), k))
        a = sangreea(d, k, trees, w)
        greedy = total_gil(a, d, trees, w)["weighted"]
        rand_mean = float(np.mean(
            [partition_cost(_random_partition(rng, len(d), k))
             for _ in range(100)]
        ))
        assert opt <= greedy + 1e-9
        assert greedy <= rand_mean + 1e-9
    print("\n[PASS] brute-force sandwich: OPT <= greedy <= mean(random) on "
          "50 toy instances (n<=8, k=2)")


def test_utility_degradation_shape(adult500, adult_trees, grid):
    """Normalized GIL is rank-increasing in k (Spearman >= 0.9); average
    income accuracy at k=200 does not exceed the original data's."""
    results, _ = grid
    ks = list(K_GRID)
    gils = [results[k][1] for k in ks]
    rho = spearman(ks, gils)
    assert rho >= 0.9

    def avg_income_accuracy(data):
        reports = [cross_validate(spec, data, "income", folds=5, seed=7)
                   for spec in FOUR_CLASSIFIERS]
        return float(np.mean([r.accuracy for r in reports]))

    acc_original = avg_income_accuracy(adult500)
    acc_k200 = avg_income_accuracy(results[200][0])
    assert acc_k200 <= acc_original
    print(f"\n[PASS] utility-degradation shape: Spearman(k, GIL) = {rho:.3f} "
          f">= 0.9; income accuracy k=200 {acc_k200:.3f} <= k=0 "
          f"{acc_original:.3f}")


def test_classifier_sanity(adult3000):
    """Every classifier beats the majority-class income rate on the raw
    3,000-row subset; the metrics module reproduces the hand-computed
    confusion case exactly."""
    labels, _ = make_target(adult3000, "income")
    majority = max(labels.count(0), labels.count(1)) / len(labels)
    accs = {}
    for spec in FOUR_CLASSIFIERS:
        rep = cross_validate(spec, adult3000, "income", folds=5, seed=7)
        accs[spec.kind] = rep.accuracy
        assert rep.accuracy > majority, (spec.kind, rep.accuracy, majority)

    predicted = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
    actual = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0]
    frag = metrics(predicted, actual)
    assert frag.per_class[1]["precision"] == 2 / 3
    assert frag.per_class[1]["recall"] == 2 / 3
    assert frag.per_class[1]["f1"] == 2 / 3
    assert frag.accuracy == 0.8
    summary = ", ".join(f"{kind}={acc:.3f}" for kind, acc in accs.items())
    print(f"\n[PASS] classifier sanity: majority={majority:.3f}; {summary}; "
          f"confusion example exact")


def test_sweep_and_replay_determinism(adult60, adult_trees):
    """Identical sweep configs emit byte-identical results.csv; 100 fuzzed
    session logs replay to byte-identical exports."""
    cfg = SweepConfig(
        k_grid=(2, 4),
        regimes=(RegimeSpec("equal", "equal"),),
        targets=("income",),
        classifiers=(ClassifierSpec("logistic_regression", seed=7),),
        folds=2,
        seed=7,
    )
    a = results_csv(run_sweep(cfg, adult60, adult_trees))
    b = results_csv(run_sweep(cfg, adult60, adult_trees))
    assert a.encode() == b.encode()

    rng = np.random.default_rng(404)
    for trial in range(100):
        d, trees = random_toy_problem(rng, n=int(rng.integers(6, 13)))
        k = int(rng.integers(2, 4))
        m = int(rng.integers(2, 5))
        w0 = equal_weights(d.qi_names())
        s = Session(d, trees, k, w0, m=m)
        while s.phase != "complete":
            r = rng.random()
            if r < 0.15:
                s.set_weights({q: float(rng.uniform(0.05, 1.0))
                               for q in d.qi_names()})
            elif r < 0.25:
                s.autopilot()
            else:
                p = s.propose()
                pick = p.candidates[int(rng.integers(0, len(p.candidates)))]
                s.choose(pick["record"])
        assert export(replay(d, trees, k, w0, m, s.log_jsonl())) == s.export()
    print("\n[PASS] determinism: sweep results.csv byte-identical; 100 fuzzed "
          "logs replay byte-identically")


def test_weight_update_properties():
    """Positivity, sum-normalization, constant-cost no-op, and cost-scale
    invariance (1e-9) over 1,000 random update instances."""
    rng = np.random.default_rng(505)
    for _ in range(1000):
        n_qi = int(rng.integers(2, 11))
        n_cand = int(rng.integers(2, 7))
        names = [f"q{i}" for i in range(n_qi)]
        w = WeightVector.normalized(
            {n: float(rng.uniform(0.05, 3.0)) for n in names}
        )
        costs = rng.uniform(0.0, 1.0, size=(n_cand, n_qi))
        costs[rng.integers(0, n_cand)] = rng.uniform(0.5, 1.0, size=n_qi)
        chosen = int(rng.integers(0, n_cand))

        out = iml_update(w, costs, chosen)
        vals = out.as_array(names)
        assert np.all(vals > 0)
        assert math.isclose(float(vals.sum()), n_qi, rel_tol=1e-9)

        constant = np.tile(rng.uniform(0.0, 2.0, size=n_qi), (n_cand, 1))
        noop = iml_update(w, constant, chosen)
        np.testing.assert_allclose(noop.as_array(names), w.as_array(names),
                                   rtol=1e-12)

        scale = float(rng.uniform(0.2, 5.0))
        scaled = iml_update(w, costs * scale, chosen)
        np.testing.assert_allclose(scaled.as_array(names), vals, rtol=1e-9)
    print("\n[PASS] weight-update properties: positivity, normalization, "
          "constant-cost no-op, scale invariance over 1,000 instances")
