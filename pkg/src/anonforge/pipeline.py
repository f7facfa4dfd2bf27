"""Batch experiment: sweep k x weight-regime, classify every anonymized
dataset, and emit plot-ready reports with the original data as the k=0
point of every series.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .anonymizer import AnonymizedDataset, sangreea, total_gil
from .dataset import Dataset
from .errors import RangeError, ReportError, SchemaError, WeightError
from .evaluation import ClassifierSpec, cross_validate
from .hierarchy import Hierarchy
from .session import Session, parse_action_log
from .weights import WeightVector, bias_weights, equal_weights

log = logging.getLogger("anonforge.pipeline")

ORIGINAL_REGIME = "original"

POLICIES = ("engine_pick", "random", "worst_pick")


@dataclass(frozen=True)
class RegimeSpec:
    """One weight regime of the sweep.

    kind=equal needs nothing; kind=bias carries slider positions;
    kind=iml carries either a recorded action log or a scripted policy.
    """

    kind: str
    name: str
    sliders: dict | None = None
    log_text: str | None = None
    log_k: int | None = None
    log_m: int = 3
    policy: str | None = None
    policy_seed: int = 0
    policy_k: int | None = None
    policy_m: int = 3

    def __post_init__(self):
        if self.kind not in ("equal", "bias", "iml"):
            raise SchemaError(f"unknown regime kind {self.kind!r}")
        if self.kind == "bias" and not self.sliders:
            raise WeightError("bias regime needs slider values")
        if self.kind == "iml" and not (self.log_text or self.policy):
            raise SchemaError("iml regime needs an action log or a policy")
        if self.policy is not None and self.policy not in POLICIES:
            raise SchemaError(f"unknown policy {self.policy!r}; expected {POLICIES}")


@dataclass(frozen=True)
class SweepConfig:
    k_grid: tuple[int, ...]
    regimes: tuple[RegimeSpec, ...]
    targets: tuple[str, ...]
    classifiers: tuple[ClassifierSpec, ...]
    folds: int = 5
    seed: int = 7

    def __post_init__(self):
        ks = list(self.k_grid)
        if not ks:
            raise RangeError("k_grid cannot be empty")
        if any(k < 2 for k in ks):
            raise RangeError("every k must be >= 2")
        if ks != sorted(set(ks)):
            raise RangeError("k_grid must be ascending and unique")
        if not self.regimes or not self.targets or not self.classifiers:
            raise SchemaError("regimes, targets and classifiers must be non-empty")


@dataclass(frozen=True)
class SweepRow:
    k: int  # 0 = original dataset
    regime: str
    target: str
    classifier: str  # kind or "average"
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    gil_normalized: float
    flags: tuple[str, ...] = ()


@dataclass
class SweepResult:
    rows: list[SweepRow]
    anonymize_calls: int
    cache_hits: int
    config: SweepConfig
    backend: str

    def sorted_rows(self) -> list[SweepRow]:
        return sorted(
            self.rows, key=lambda r: (r.k, r.regime, r.target, r.classifier)
        )


def resolve_regime_weights(
    regime: RegimeSpec,
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    k_grid: Sequence[int],
) -> WeightVector:
    """Produce the WeightVector a regime contributes to the batch run."""
    qis = dataset.qi_names()
    if regime.kind == "equal":
        return equal_weights(qis)
    if regime.kind == "bias":
        return bias_weights({name: regime.sliders[name] for name in qis})
    # iml: weights evolved over one interactive session
    if regime.log_text is not None:
        k = regime.log_k or min(k_grid)
        s = Session(dataset, hierarchies, k, equal_weights(qis), m=regime.log_m)
        for i, action in enumerate(parse_action_log(regime.log_text)):
            if action.kind == "choice":
                s.choose(action.payload["record"])
            elif action.kind == "set_weights":
                s.set_weights(action.payload["sliders"])
            elif action.kind == "autopilot":
                s.autopilot()
        return s.weights
    return run_policy_session(
        dataset,
        hierarchies,
        k=regime.policy_k or min(k_grid),
        m=regime.policy_m,
        policy=regime.policy,
        seed=regime.policy_seed,
    )


def run_policy_session(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    k: int,
    m: int,
    policy: str,
    seed: int = 0,
) -> WeightVector:
    """Scripted stand-in for a human session; returns the final weights."""
    if policy not in POLICIES:
        raise SchemaError(f"unknown policy {policy!r}")
    rng = np.random.default_rng(seed)
    s = Session(dataset, hierarchies, k, equal_weights(dataset.qi_names()), m=m)
    while s.phase != "complete":
        proposal = s.propose()
        records = proposal.candidate_records()
        if policy == "engine_pick":
            pick = records[0]
        elif policy == "worst_pick":
            pick = records[-1]
        else:
            pick = records[int(rng.integers(0, len(records)))]
        s.choose(pick)
    return s.weights


def run_sweep(
    config: SweepConfig,
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
) -> SweepResult:
    """Anonymize once per (k, regime), evaluate every target x classifier."""
    rows: list[SweepRow] = []
    anon_cache: dict[tuple[int, str], tuple[AnonymizedDataset, float]] = {}
    calls = 0
    hits = 0

    def anonymized(k: int, regime: RegimeSpec, w: WeightVector):
        nonlocal calls, hits
        key = (k, regime.name)
        if key in anon_cache:
            hits += 1
            log.info("anonymization cache hit for k=%d regime=%s", k, regime.name)
            return anon_cache[key]
        calls += 1
        log.info("anonymizing k=%d regime=%s", k, regime.name)
        a = sangreea(dataset, k, hierarchies, w)
        gil = total_gil(a, dataset, hierarchies, w)["normalized"]
        anon_cache[key] = (a, gil)
        return anon_cache[key]

    # k=0: the original dataset, one row per target x classifier
    for target in config.targets:
        reports = []
        for spec in config.classifiers:
            rep = cross_validate(spec, dataset, target, config.folds, config.seed)
            reports.append(rep)
            rows.append(
                SweepRow(0, ORIGINAL_REGIME, target, spec.kind, rep.accuracy,
                         rep.macro_precision, rep.macro_recall, rep.macro_f1,
                         0.0, rep.flags)
            )
        rows.append(_average_row(0, ORIGINAL_REGIME, target, reports, 0.0))

    regime_weights = {
        r.name: resolve_regime_weights(r, dataset, hierarchies, config.k_grid)
        for r in config.regimes
    }

    for k in config.k_grid:
        for regime in config.regimes:
            try:
                a, gil = anonymized(k, regime, regime_weights[regime.name])
                for target in config.targets:
                    reports = []
                    for spec in config.classifiers:
                        rep = cross_validate(spec, a, target, config.folds, config.seed)
                        reports.append(rep)
                        rows.append(
                            SweepRow(k, regime.name, target, spec.kind,
                                     rep.accuracy, rep.macro_precision,
                                     rep.macro_recall, rep.macro_f1, gil,
                                     rep.flags)
                        )
                    rows.append(_average_row(k, regime.name, target, reports, gil))
            except Exception as exc:
                exc.args = (f"[k={k} regime={regime.name}] {exc}",)
                raise

    return SweepResult(rows, calls, hits, config, kernels.backend_name())


def _average_row(k, regime, target, reports, gil) -> SweepRow:
    return SweepRow(
        k, regime, target, "average",
        float(np.mean([r.accuracy for r in reports])),
        float(np.mean([r.macro_precision for r in reports])),
        float(np.mean([r.macro_recall for r in reports])),
        float(np.mean([r.macro_f1 for r in reports])),
        gil,
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("k", "regime", "target", "classifier", "accuracy",
               "macro_precision", "macro_recall", "macro_f1",
               "gil_normalized", "flags")


def results_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.sorted_rows():
        writer.writerow([
            r.k, r.regime, r.target, r.classifier,
            repr(r.accuracy), repr(r.macro_precision), repr(r.macro_recall),
            repr(r.macro_f1), repr(r.gil_normalized), ";".join(r.flags),
        ])
    return buf.getvalue()


def plot_series(result: SweepResult, target: str) -> dict:
    """Per-regime series of averaged metrics, k=0 (original) first."""
    averaged = [
        r for r in result.sorted_rows()
        if r.target == target and r.classifier == "average"
    ]
    original = [r for r in averaged if r.k == 0]
    series: dict[str, list[dict]] = {}
    for regime in sorted({r.regime for r in averaged if r.regime != ORIGINAL_REGIME}):
        pts = original + [r for r in averaged if r.regime == regime]
        series[regime] = [
            {
                "k": p.k,
                "accuracy": p.accuracy,
                "macro_f1": p.macro_f1,
                "gil_normalized": p.gil_normalized,
            }
            for p in sorted(pts, key=lambda r: r.k)
        ]
    return {"target": target, "series": series}


def emit_report(result: SweepResult, outdir: str) -> list[str]:
    """Write results.csv, plots/<target>.json and run-manifest.json."""
    try:
        os.makedirs(os.path.join(outdir, "plots"), exist_ok=True)
        written = []

        path = os.path.join(outdir, "results.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(results_csv(result))
        written.append(path)

        for target in result.config.targets:
            path = os.path.join(outdir, "plots", f"{target}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(plot_series(result, target), fh, indent=2, sort_keys=True)
                fh.write("\n")
            written.append(path)

        manifest = {
            "k_grid": list(result.config.k_grid),
            "regimes": [r.name for r in result.config.regimes],
            "targets": list(result.config.targets),
            "classifiers": [
                {"kind": s.kind, "seed": s.seed, "hyperparams": s.hyperparams}
                for s in result.config.classifiers
            ],
            "folds": result.config.folds,
            "seed": result.config.seed,
            "anonymize_calls": result.anonymize_calls,
            "cache_hits": result.cache_hits,
            "kernel_backend": result.backend,
            "version": _version(),
        }
        path = os.path.join(outdir, "run-manifest.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
        return written
    except OSError as exc:
        raise ReportError(f"failed to write report: {exc}") from exc


def _version() -> str:
    from . import __version__

    return __version__


# ---------------------------------------------------------------------------
# Config file parsing (CLI / service surface)
# ---------------------------------------------------------------------------


def regime_from_json(obj: dict, base_dir: str = ".") -> RegimeSpec:
    kind = obj.get("kind")
    name = obj.get("name") or kind
    if kind == "equal":
        return RegimeSpec("equal", name)
    if kind == "bias":
        sliders = obj.get("sliders")
        if isinstance(sliders, str):
            with open(os.path.join(base_dir, sliders), encoding="utf-8") as fh:
                sliders = json.load(fh)
        return RegimeSpec("bias", name, sliders=sliders)
    if kind == "iml":
        if "log" in obj:
            with open(os.path.join(base_dir, obj["log"]), encoding="utf-8") as fh:
                text = fh.read()
            return RegimeSpec("iml", name, log_text=text,
                              log_k=obj.get("k"), log_m=obj.get("m", 3))
        return RegimeSpec(
            "iml", name,
            policy=obj.get("policy", "engine_pick"),
            policy_seed=obj.get("policy_seed", 0),
            policy_k=obj.get("k"),
            policy_m=obj.get("m", 3),
        )
    raise SchemaError(f"unknown regime kind {kind!r}")


def config_from_json(obj: dict, base_dir: str = ".") -> SweepConfig:
    try:
        regimes = tuple(regime_from_json(r, base_dir) for r in obj["regimes"])
        classifiers = tuple(
            ClassifierSpec(c["kind"], c.get("hyperparams", {}),
                           c.get("seed", obj.get("seed", 7)))
            for c in obj["classifiers"]
        )
        return SweepConfig(
            k_grid=tuple(obj["k_grid"]),
            regimes=regimes,
            targets=tuple(obj["targets"]),
            classifiers=classifiers,
            folds=obj.get("folds", 5),
            seed=obj.get("seed", 7),
        )
    except KeyError as exc:
        raise SchemaError(f"sweep config is missing field {exc}") from exc
