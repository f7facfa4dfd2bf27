"""Interactive anonymization sessions: propose candidates, take human
choices, adapt weights, stream metrics, and replay recorded action logs.

A session drives the same greedy state the batch clusterer uses; the only
additions are the candidate round protocol, the weight update fired by each
human choice, and the append-only action log that makes every session
deterministically replayable.
"""

from __future__ import annotations

import json
import secrets
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .anonymizer import (
    AnonymizedDataset,
    CandidateSet,
    EncodedProblem,
    GreedyState,
    export,
    format_value,
)
from .dataset import Dataset
from .errors import OracleError, PhaseError, RangeError, ReplayError, WeightError
from .hierarchy import Hierarchy
from .weights import UpdateParams, WeightVector, bias_weights, iml_update

MIN_M, MAX_M = 2, 10


@dataclass(frozen=True)
class Action:
    """One logged session event."""

    seq: int
    kind: str  # choice | set_weights | autopilot
    payload: dict

    def to_json(self) -> dict:
        out = {"seq": self.seq, "type": self.kind}
        out.update(self.payload)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Action":
        obj = dict(obj)
        try:
            seq = int(obj.pop("seq"))
            kind = obj.pop("type")
        except (KeyError, ValueError) as exc:
            raise ReplayError(f"malformed action entry: {exc}") from exc
        if kind == "choice":
            payload = {"record": int(obj["record"])}
        elif kind == "set_weights":
            payload = {"sliders": dict(obj["sliders"])}
        elif kind == "autopilot":
            payload = {}
        else:
            raise ReplayError(f"unknown action type {kind!r}", seq=seq)
        return cls(seq, kind, payload)


@dataclass(frozen=True)
class RoundProposal:
    """One interactive round: the open cluster plus the m cheapest growers."""

    cluster_members: tuple[int, ...]
    cluster_generalization: dict[str, str]
    cluster_weighted_gil: float
    candidates: list[dict]  # {record, weighted_delta, costs: {qi: v}, values: {qi: v}}
    engine_pick: int  # index into candidates (0 after ascending sort)

    def candidate_records(self) -> list[int]:
        return [c["record"] for c in self.candidates]

    def to_json(self) -> dict:
        return {
            "cluster": {
                "members": list(self.cluster_members),
                "generalization": self.cluster_generalization,
                "weighted_gil": self.cluster_weighted_gil,
            },
            "candidates": self.candidates,
            "engine_pick": self.engine_pick,
        }


@dataclass(frozen=True)
class SessionMetrics:
    """Live metrics pushed after every state-changing action."""

    gil_unweighted: float
    gil_weighted: float
    gil_normalized_partial: float
    class_histogram: dict[int, int]
    records_remaining: int
    records_assigned: int
    weights: dict[str, float]
    phase: str

    def to_json(self) -> dict:
        return {
            "gil": {
                "unweighted": self.gil_unweighted,
                "weighted": self.gil_weighted,
                "normalized_partial": self.gil_normalized_partial,
            },
            "class_histogram": {str(k): v for k, v in sorted(self.class_histogram.items())},
            "records_remaining": self.records_remaining,
            "records_assigned": self.records_assigned,
            "weights": self.weights,
            "phase": self.phase,
        }


class Session:
    """Single-writer interactive state machine over one dataset."""

    def __init__(
        self,
        dataset: Dataset,
        hierarchies: Mapping[str, Hierarchy],
        k: int,
        initial_weights: WeightVector,
        m: int = 3,
        params: UpdateParams = UpdateParams(),
        session_id: str | None = None,
    ):
        if not MIN_M <= m <= MAX_M:
            raise RangeError(f"m must be in [{MIN_M}, {MAX_M}], got {m}")
        self.id = session_id or secrets.token_urlsafe(9)
        self.dataset = dataset
        self.hierarchies = dict(hierarchies)
        self.k = k
        self.m = m
        self.params = params
        self.prob = EncodedProblem(dataset, hierarchies)
        self.state = GreedyState(self.prob, k, initial_weights)
        self.phase = "loaded"
        self.actions: list[Action] = []
        self._offer: CandidateSet | None = None
        self._proposal: RoundProposal | None = None

    @property
    def weights(self) -> WeightVector:
        return self.state.weights

    # -- round protocol -------------------------------------------------

    def propose(self) -> RoundProposal:
        if self.phase == "complete":
            raise PhaseError("session is complete; no further rounds")
        self.phase = "running"
        if self._proposal is None:
            self._offer = self.state.candidate_set(self.m)
            self._proposal = self._build_proposal(self._offer)
        return self._proposal

    def _build_proposal(self, offer: CandidateSet) -> RoundProposal:
        d = self.dataset
        open_state = self.state.open
        num_terms, cat_terms = open_state.plain_terms()
        weighted = open_state.size * (
            float(self.state.w_num @ num_terms) + float(self.state.w_cat @ cat_terms)
        )
        gen = {
            name: format_value(v)
            for name, v in open_state.to_cluster().generalization.items()
        }
        qi = self.prob.qi_names
        cands = []
        for c in offer.candidates:
            idxs = [d.attribute_index(n) for n in qi]
            cands.append(
                {
                    "record": c.record,
                    "weighted_delta": c.weighted_delta,
                    "costs": {n: float(v) for n, v in zip(qi, c.costs)},
                    "values": {n: d.records[c.record][i] for n, i in zip(qi, idxs)},
                }
            )
        return RoundProposal(
            cluster_members=offer.cluster_members,
            cluster_generalization=gen,
            cluster_weighted_gil=weighted,
            candidates=cands,
            engine_pick=0,
        )

    def _invalidate(self) -> None:
        self._offer = None
        self._proposal = None

    def _log(self, kind: str, payload: dict) -> None:
        self.actions.append(Action(len(self.actions), kind, payload))

    def choose(self, record: int) -> SessionMetrics:
        if self.phase == "complete":
            raise PhaseError("session is complete")
        self.propose()
        offer = self._offer
        records = offer.records
        if record not in records:
            raise OracleError(
                f"record {record} is not among the offered candidates {records}"
            )
        # the choice teaches the engine which attributes the human keeps
        # specific; a single-candidate endgame round carries no information
        if len(records) >= 2:
            self.state.set_weights(
                iml_update(
                    self.weights,
                    offer.cost_matrix(),
                    records.index(record),
                    self.params,
                )
            )
        self.state.add_to_open(record)
        if self.state.done():
            self.phase = "complete"
        self._log("choice", {"record": int(record)})
        self._invalidate()
        return self.metrics()

    def set_weights(self, sliders: Mapping[str, float]) -> SessionMetrics:
        if self.phase == "complete":
            raise PhaseError("session is complete")
        qi = self.prob.qi_names
        if set(sliders) != set(qi):
            raise WeightError(
                f"sliders must cover exactly the QI set {qi}, got {sorted(sliders)}"
            )
        ordered = {name: float(sliders[name]) for name in qi}
        self.state.set_weights(bias_weights(ordered))
        self._log("set_weights", {"sliders": ordered})
        self._invalidate()
        return self.metrics()

    def autopilot(self) -> AnonymizedDataset:
        if self.phase == "complete":
            raise PhaseError("session is complete")
        self.phase = "running"
        self.state.run_to_completion(oracle=None)
        self.phase = "complete"
        self._log("autopilot", {})
        self._invalidate()
        return self.state.result()

    # -- observers --------------------------------------------------------

    def metrics(self) -> SessionMetrics:
        states = self.state.all_states()
        unweighted = 0.0
        weighted = 0.0
        for st in states:
            num_terms, cat_terms = st.plain_terms()
            plain = float(num_terms.sum()) + float(cat_terms.sum())
            unweighted += st.size * plain
            weighted += st.size * (
                float(self.state.w_num @ num_terms)
                + float(self.state.w_cat @ cat_terms)
            )
        n = self.prob.n
        n_qi = len(self.prob.qi_names)
        remaining = self.state.n_unassigned
        histogram = dict(Counter(st.size for st in states))
        return SessionMetrics(
            gil_unweighted=unweighted,
            gil_weighted=weighted,
            gil_normalized_partial=unweighted / (n * n_qi) if n and n_qi else 0.0,
            class_histogram=histogram,
            records_remaining=remaining,
            records_assigned=n - remaining,
            weights=dict(self.weights.entries),
            phase=self.phase,
        )

    def result(self) -> AnonymizedDataset:
        if self.phase != "complete":
            raise PhaseError("session has not finished")
        return self.state.result()

    def export(self) -> str:
        return export(self.result())

    # -- log I/O -----------------------------------------------------------

    def log_jsonl(self) -> str:
        return "".join(json.dumps(a.to_json(), sort_keys=True) + "\n" for a in self.actions)


def create(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    k: int,
    initial_weights: WeightVector,
    m: int = 3,
    params: UpdateParams = UpdateParams(),
) -> Session:
    return Session(dataset, hierarchies, k, initial_weights, m=m, params=params)


def parse_action_log(text: str) -> list[Action]:
    actions = []
    for line_no, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReplayError(f"line {line_no} is not valid JSON: {exc}") from exc
        actions.append(Action.from_json(obj))
    return actions


def replay(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    k: int,
    initial_weights: WeightVector,
    m: int,
    log: Sequence[Action] | str,
    params: UpdateParams = UpdateParams(),
) -> AnonymizedDataset:
    """Re-run a recorded session; the export must match the original byte
    for byte. Any divergence raises ReplayError at the offending action."""
    if isinstance(log, str):
        log = parse_action_log(log)
    s = Session(dataset, hierarchies, k, initial_weights, m=m, params=params)
    for i, action in enumerate(log):
        if action.seq != i:
            raise ReplayError(
                f"action sequence numbers must be contiguous from 0; "
                f"expected {i}, got {action.seq}",
                seq=action.seq,
            )
        try:
            if action.kind == "choice":
                s.choose(action.payload["record"])
            elif action.kind == "set_weights":
                s.set_weights(action.payload["sliders"])
            elif action.kind == "autopilot":
                s.autopilot()
        except (OracleError, PhaseError, WeightError, RangeError) as exc:
            raise ReplayError(f"log diverges at seq {i}: {exc}", seq=i) from exc
    if s.phase != "complete":
        raise ReplayError("log does not drive the session to completion")
    return s.result()
