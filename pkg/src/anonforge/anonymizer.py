"""Weighted General Information Loss and the greedy k-anonymous clustering.

The loss of a cluster is its size times the sum over quasi-identifiers of a
normalized generalization cost: numeric attributes contribute the cluster
interval width over the dataset-wide range, categorical attributes the
height of the generalization node's subtree over the full tree height.
Weighted variants scale each attribute's term by its importance weight.

The clustering grows one cluster at a time to size k, always adding the
record that increases the weighted loss least (ties to the lowest record
index); records left over when fewer than k remain are absorbed into the
existing cluster that charges them least.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .dataset import Dataset, validate_schema
from .errors import (
    ClusterError,
    HierarchyError,
    OracleError,
    RangeError,
    SchemaError,
    WeightError,
)
from .hierarchy import Hierarchy, HierarchyNode, lca, node_height
from .weights import WeightVector


class Interval(NamedTuple):
    """Closed numeric generalization interval."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


GeneralizedValue = Interval | HierarchyNode


@dataclass(frozen=True)
class Cluster:
    """An equivalence class under construction or in a finished result."""

    members: tuple[int, ...]
    generalization: dict[str, GeneralizedValue]

    def __post_init__(self):
        if not self.members:
            raise ClusterError("cluster must have at least one member")

    def verify(self, d: Dataset, hierarchies: Mapping[str, Hierarchy]) -> bool:
        """Recompute the generalization from members and compare."""
        return generalize(d, self.members, hierarchies) == self.generalization


@dataclass(frozen=True)
class GilBreakdown:
    per_attribute: dict[str, float]
    unweighted_total: float
    weighted_total: float


def _require_hierarchies(d: Dataset, hierarchies: Mapping[str, Hierarchy]) -> None:
    for name in d.qi_names():
        if d.attribute(name).kind == "categorical" and name not in hierarchies:
            raise HierarchyError(f"no hierarchy supplied for categorical QI {name!r}")


def generalize(
    d: Dataset, members: Iterable[int], hierarchies: Mapping[str, Hierarchy]
) -> dict[str, GeneralizedValue]:
    """Minimal generalization tuple covering the given records."""
    members = list(members)
    if not members:
        raise ClusterError("cannot generalize an empty member set")
    _require_hierarchies(d, hierarchies)
    out: dict[str, GeneralizedValue] = {}
    for name in d.qi_names():
        idx = d.attribute_index(name)
        values = [d.records[r][idx] for r in members]
        if any(v is None for v in values):
            raise SchemaError(f"missing value in QI column {name!r}")
        if d.attribute(name).kind == "numeric":
            out[name] = Interval(float(min(values)), float(max(values)))
        else:
            out[name] = lca(hierarchies[name], set(values))
    return out


def _attribute_terms(
    d: Dataset,
    generalization: Mapping[str, GeneralizedValue],
    hierarchies: Mapping[str, Hierarchy],
) -> dict[str, float]:
    terms: dict[str, float] = {}
    for name in d.qi_names():
        gv = generalization[name]
        if isinstance(gv, Interval):
            lo, hi = d.numeric_ranges[name]
            rng = hi - lo
            terms[name] = gv.width / rng if rng > 0 else 0.0
        else:
            h = hierarchies[name]
            terms[name] = node_height(h, gv) / h.height
    return terms


def cluster_gil(
    d: Dataset,
    cl: Cluster,
    hierarchies: Mapping[str, Hierarchy],
    weights: WeightVector,
) -> GilBreakdown:
    """Per-attribute loss terms and the size-scaled totals for one cluster."""
    qi = d.qi_names()
    missing = [n for n in qi if n not in weights.entries]
    if missing:
        raise WeightError(f"weight vector is missing QIs: {missing}")
    terms = _attribute_terms(d, cl.generalization, hierarchies)
    size = len(cl.members)
    unweighted = size * sum(terms[n] for n in qi)
    weighted = size * sum(weights[n] * terms[n] for n in qi)
    return GilBreakdown(terms, unweighted, weighted)


def gil_delta(
    d: Dataset,
    cl: Cluster,
    candidate: int,
    hierarchies: Mapping[str, Hierarchy],
    weights: WeightVector,
) -> float:
    """Weighted loss increase from adding `candidate` to `cl`."""
    if candidate in cl.members:
        raise ClusterError(f"record {candidate} is already in the cluster")
    before = cluster_gil(d, cl, hierarchies, weights).weighted_total
    grown = Cluster(
        cl.members + (candidate,),
        generalize(d, cl.members + (candidate,), hierarchies),
    )
    after = cluster_gil(d, grown, hierarchies, weights).weighted_total
    return after - before


class AnonymizedDataset:
    """A k-anonymous view: the cluster partition plus per-record output rows."""

    def __init__(
        self,
        schema,
        clusters: Sequence[Cluster],
        k: int,
        weights: WeightVector,
        n_records: int,
        sensitive_values: Sequence,
    ):
        self.schema = tuple(schema)
        self.clusters = list(clusters)
        self.k = k
        self.weights = weights
        self.n_records = n_records
        self.sensitive_values = list(sensitive_values)

        covered = sorted(m for cl in self.clusters for m in cl.members)
        if covered != list(range(n_records)):
            raise ClusterError("clusters do not partition the record index set")
        for cl in self.clusters:
            if len(cl.members) < k:
                raise ClusterError(
                    f"cluster of size {len(cl.members)} violates k={k}"
                )
        self.assignment = np.empty(n_records, dtype=np.int64)
        for ci, cl in enumerate(self.clusters):
            for m in cl.members:
                self.assignment[m] = ci

    @property
    def qi_names(self) -> list[str]:
        return [a.name for a in self.schema if a.role == "quasi_identifier"]

    @property
    def sensitive_name(self) -> str:
        return next(a.name for a in self.schema if a.role == "sensitive")

    def generalized_rows(self) -> list[dict]:
        """One output row per input record, in input order."""
        rows = []
        for r in range(self.n_records):
            cl = self.clusters[self.assignment[r]]
            row = dict(cl.generalization)
            row[self.sensitive_name] = self.sensitive_values[r]
            rows.append(row)
        return rows


def total_gil(
    a: AnonymizedDataset,
    d: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    weights: WeightVector,
) -> dict[str, float]:
    """Dataset-level loss totals; `normalized` divides by n * (QI count)."""
    unweighted = 0.0
    weighted = 0.0
    for cl in a.clusters:
        b = cluster_gil(d, cl, hierarchies, weights)
        unweighted += b.unweighted_total
        weighted += b.weighted_total
    n_qi = len(d.qi_names())
    return {
        "unweighted": unweighted,
        "weighted": weighted,
        "normalized": unweighted / (len(d) * n_qi) if len(d) and n_qi else 0.0,
    }


# ---------------------------------------------------------------------------
# Encoded problem + incremental greedy state (kernel-backed)
# ---------------------------------------------------------------------------


class EncodedProblem:
    """Array encoding of a dataset + hierarchies for the hot kernels."""

    def __init__(self, d: Dataset, hierarchies: Mapping[str, Hierarchy]):
        validate_schema(d.schema, for_run=True)
        _require_hierarchies(d, hierarchies)
        self.dataset = d
        self.hierarchies = dict(hierarchies)
        self.qi_names = d.qi_names()
        self.num_names = [n for n in self.qi_names if d.attribute(n).kind == "numeric"]
        self.cat_names = [n for n in self.qi_names if d.attribute(n).kind == "categorical"]
        n = len(d)
        s, t = len(self.num_names), len(self.cat_names)

        self.num_vals = np.zeros((n, s), dtype=np.float64)
        for j, name in enumerate(self.num_names):
            col = d.column(name)
            if any(v is None for v in col):
                raise SchemaError(f"missing value in QI column {name!r}")
            self.num_vals[:, j] = col

        self.inv_num_range = np.zeros(s, dtype=np.float64)
        for j, name in enumerate(self.num_names):
            lo, hi = d.numeric_ranges[name]
            if hi > lo:
                self.inv_num_range[j] = 1.0 / (hi - lo)

        self.cat_codes = np.zeros((n, t), dtype=np.int32)
        lca_parts, h_parts, ncs, inv_h = [], [], [], []
        for j, name in enumerate(self.cat_names):
            h = self.hierarchies[name]
            col = d.column(name)
            if any(v is None for v in col):
                raise SchemaError(f"missing value in QI column {name!r}")
            self.cat_codes[:, j] = [h.leaf_index(v) for v in col]
            nc = len(h.labels)
            table = np.empty((nc, nc), dtype=np.int32)
            for a in range(nc):
                for b in range(nc):
                    table[a, b] = h.lca_indices(a, b)
            lca_parts.append(table.ravel())
            h_parts.append(np.asarray(h.subtree_height, dtype=np.float64))
            ncs.append(nc)
            inv_h.append(1.0 / h.height)

        self.cat_nc = np.asarray(ncs, dtype=np.int64)
        self.lca_off = np.zeros(t + 1, dtype=np.int64)
        self.h_off = np.zeros(t + 1, dtype=np.int64)
        for j in range(t):
            self.lca_off[j + 1] = self.lca_off[j] + ncs[j] * ncs[j]
            self.h_off[j + 1] = self.h_off[j] + ncs[j]
        self.lca_flat = (
            np.concatenate(lca_parts).astype(np.int32) if t else np.zeros(0, np.int32)
        )
        self.h_flat = (
            np.concatenate(h_parts) if t else np.zeros(0, np.float64)
        )
        self.inv_tree_h = np.asarray(inv_h, dtype=np.float64)

        # kernel column -> position in schema QI order (numeric block first)
        self.kernel_to_schema = np.asarray(
            [self.qi_names.index(n) for n in self.num_names + self.cat_names],
            dtype=np.int64,
        )

    @property
    def n(self) -> int:
        return len(self.dataset)

    def split_weights(self, weights: WeightVector) -> tuple[np.ndarray, np.ndarray]:
        missing = [n for n in self.qi_names if n not in weights.entries]
        if missing:
            raise WeightError(f"weight vector is missing QIs: {missing}")
        return weights.as_array(self.num_names), weights.as_array(self.cat_names)

    def node_for(self, attr: str, index: int) -> HierarchyNode:
        return HierarchyNode(self.hierarchies[attr], int(index))


class ClusterState:
    """Mutable per-cluster arrays consumed by the kernels."""

    __slots__ = ("prob", "members", "lo", "hi", "gen")

    def __init__(self, prob: EncodedProblem, seed_record: int):
        self.prob = prob
        self.members = [seed_record]
        self.lo = prob.num_vals[seed_record].copy()
        self.hi = prob.num_vals[seed_record].copy()
        self.gen = prob.cat_codes[seed_record].astype(np.int32).copy()

    @property
    def size(self) -> int:
        return len(self.members)

    def add(self, record: int) -> None:
        p = self.prob
        np.minimum(self.lo, p.num_vals[record], out=self.lo)
        np.maximum(self.hi, p.num_vals[record], out=self.hi)
        for j in range(len(p.cat_names)):
            code = p.cat_codes[record, j]
            self.gen[j] = p.lca_flat[
                p.lca_off[j] + self.gen[j] * p.cat_nc[j] + code
            ]
        self.members.append(record)

    def deltas(self, cand: np.ndarray, w_num: np.ndarray, w_cat: np.ndarray) -> np.ndarray:
        p = self.prob
        return kernels.delta_all(
            p.num_vals, p.cat_codes, p.inv_num_range,
            p.lca_flat, p.lca_off, p.cat_nc, p.h_flat, p.h_off, p.inv_tree_h,
            w_num, w_cat, self.lo, self.hi, self.gen, float(self.size), cand,
        )

    def plain_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """Current per-attribute terms, split (numeric, categorical)."""
        p = self.prob
        num = (self.hi - self.lo) * p.inv_num_range
        cat = np.asarray(
            [p.h_flat[p.h_off[j] + self.gen[j]] * p.inv_tree_h[j]
             for j in range(len(p.cat_names))],
            dtype=np.float64,
        )
        return num, cat

    def costs(self, cand: np.ndarray) -> np.ndarray:
        """(len(cand), n_qi) plain per-attribute increments in schema QI order."""
        p = self.prob
        kernel_order = kernels.per_attribute_costs(
            p.num_vals, p.cat_codes, p.inv_num_range,
            p.lca_flat, p.lca_off, p.cat_nc, p.h_flat, p.h_off, p.inv_tree_h,
            self.lo, self.hi, self.gen, float(self.size), cand,
        )
        out = np.empty_like(kernel_order)
        out[:, p.kernel_to_schema] = kernel_order
        return out

    def to_cluster(self) -> Cluster:
        p = self.prob
        generalization: dict[str, GeneralizedValue] = {}
        for j, name in enumerate(p.num_names):
            generalization[name] = Interval(float(self.lo[j]), float(self.hi[j]))
        for j, name in enumerate(p.cat_names):
            generalization[name] = p.node_for(name, self.gen[j])
        # present attributes in schema QI order
        ordered = {name: generalization[name] for name in p.qi_names}
        return Cluster(tuple(sorted(self.members)), ordered)


class Candidate(NamedTuple):
    record: int
    weighted_delta: float
    costs: np.ndarray  # per-QI plain increments, schema QI order


@dataclass
class CandidateSet:
    """What a choice oracle (or the interactive session) gets to see."""

    cluster_members: tuple[int, ...]
    candidates: list[Candidate]

    @property
    def engine_pick(self) -> int:
        return self.candidates[0].record

    @property
    def records(self) -> list[int]:
        return [c.record for c in self.candidates]

    def cost_matrix(self) -> np.ndarray:
        return np.stack([c.costs for c in self.candidates])


ChoiceOracle = Callable[[CandidateSet], int]


class GreedyState:
    """Incremental greedy clustering shared by batch and interactive paths."""

    def __init__(self, prob: EncodedProblem, k: int, weights: WeightVector):
        n = prob.n
        if k < 2:
            raise RangeError(f"k must be >= 2, got {k}")
        if k > n:
            raise RangeError(f"k={k} exceeds the record count {n}")
        self.prob = prob
        self.k = k
        self.assigned = np.zeros(n, dtype=bool)
        self.closed: list[ClusterState] = []
        self.open: ClusterState | None = None
        self.set_weights(weights)

    # weights may evolve mid-run (interactive sessions)
    def set_weights(self, weights: WeightVector) -> None:
        self.weights = weights
        self.w_num, self.w_cat = self.prob.split_weights(weights)

    @property
    def unassigned(self) -> np.ndarray:
        return np.flatnonzero(~self.assigned)

    @property
    def n_unassigned(self) -> int:
        return int((~self.assigned).sum())

    def all_states(self) -> list[ClusterState]:
        return self.closed + ([self.open] if self.open is not None else [])

    def done(self) -> bool:
        return self.n_unassigned == 0

    def ensure_open(self) -> ClusterState:
        """Seed a new cluster with the lowest unassigned record if needed."""
        if self.open is None:
            seed = int(self.unassigned[0])
            self.open = ClusterState(self.prob, seed)
            self.assigned[seed] = True
        return self.open

    def candidate_set(self, m: int) -> CandidateSet:
        """The m cheapest growth candidates, ascending by weighted delta."""
        state = self.ensure_open()
        cand = self.unassigned
        deltas = state.deltas(cand, self.w_num, self.w_cat)
        order = np.argsort(deltas, kind="stable")[:m]
        top = cand[order]
        costs = state.costs(top)
        return CandidateSet(
            tuple(sorted(state.members)),
            [
                Candidate(int(r), float(dv), costs[i])
                for i, (r, dv) in enumerate(zip(top, deltas[order]))
            ],
        )

    def add_to_open(self, record: int) -> None:
        if self.assigned[record]:
            raise ClusterError(f"record {record} is already assigned")
        state = self.ensure_open()
        state.add(record)
        self.assigned[record] = True
        if state.size >= self.k:
            self.closed.append(state)
            self.open = None
            if 0 < self.n_unassigned < self.k:
                self.absorb_leftovers()

    def grow_step(self) -> None:
        """One engine-pick growth step (argmin, lowest index on ties)."""
        state = self.ensure_open()
        cand = self.unassigned
        deltas = state.deltas(cand, self.w_num, self.w_cat)
        self.add_to_open(int(cand[int(np.argmin(deltas))]))

    def absorb_leftovers(self) -> None:
        """Attach the final < k records to the cheapest existing clusters."""
        if self.open is not None:
            raise ClusterError("cannot absorb leftovers while a cluster is open")
        for r in self.unassigned:
            rec = np.asarray([r], dtype=np.int64)
            best_ci, best_delta = -1, np.inf
            for ci, state in enumerate(self.closed):
                delta = float(state.deltas(rec, self.w_num, self.w_cat)[0])
                if delta < best_delta:
                    best_ci, best_delta = ci, delta
            self.closed[best_ci].add(int(r))
            self.assigned[r] = True

    def run_to_completion(self, oracle: ChoiceOracle | None = None, m: int = 3) -> None:
        while not self.done():
            if self.open is None and self.n_unassigned < self.k:
                # only reachable when resuming an externally driven state
                self.absorb_leftovers()
                break
            if oracle is None:
                self.grow_step()
            else:
                offer = self.candidate_set(m)
                pick = oracle(offer)
                if pick not in offer.records:
                    raise OracleError(
                        f"oracle chose record {pick}, not among candidates {offer.records}"
                    )
                self.add_to_open(pick)

    def result(self) -> AnonymizedDataset:
        if not self.done():
            raise ClusterError("clustering is not complete")
        d = self.prob.dataset
        clusters = [st.to_cluster() for st in self.closed]
        sens_idx = d.attribute_index(d.sensitive_name())
        return AnonymizedDataset(
            d.schema,
            clusters,
            self.k,
            self.weights,
            len(d),
            [r[sens_idx] for r in d.records],
        )


def sangreea(
    d: Dataset,
    k: int,
    hierarchies: Mapping[str, Hierarchy],
    weights: WeightVector,
    choice_oracle: ChoiceOracle | None = None,
    m: int = 3,
) -> AnonymizedDataset:
    """Greedy k-anonymous clustering; deterministic when no oracle is given."""
    prob = EncodedProblem(d, hierarchies)
    state = GreedyState(prob, k, weights)
    state.run_to_completion(oracle=choice_oracle, m=m)
    return state.result()


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def format_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_value(gv: GeneralizedValue | object) -> str:
    if isinstance(gv, Interval):
        if gv.lo == gv.hi:
            return format_number(gv.lo)
        return f"{format_number(gv.lo)}-{format_number(gv.hi)}"
    if isinstance(gv, HierarchyNode):
        return "*" if gv.index == 0 else gv.label
    if isinstance(gv, float):
        return format_number(gv)
    return str(gv)


def export(a: AnonymizedDataset) -> str:
    """CSV text: QI columns then the sensitive column, input record order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = a.qi_names + [a.sensitive_name]
    writer.writerow(header)
    qi = a.qi_names
    for row in a.generalized_rows():
        writer.writerow([format_value(row[name]) for name in qi]
                        + [format_value(row[a.sensitive_name])])
    return buf.getvalue()
