"""Attribute-importance weight vectors and the three ways to produce them:
uniform, slider bias, and the multiplicative update driven by interactive
choices.

Normalization convention: weights always sum to the QI count, so the
all-ones vector makes the weighted objective coincide with the plain one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import RangeError, UpdateError, WeightError

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class UpdateParams:
    """Knobs of the interactive weight update."""

    eta: float = 0.3
    epsilon: float = 1e-9
    floor: float = 0.01

    def __post_init__(self):
        if self.eta < 0:
            raise WeightError("eta must be >= 0")
        if self.epsilon <= 0:
            raise WeightError("epsilon must be > 0")
        if self.floor < 0:
            raise WeightError("floor must be >= 0")


class WeightVector:
    """Nonnegative per-QI weights, normalized to sum to the QI count."""

    def __init__(self, entries: Mapping[str, float]):
        if not entries:
            raise WeightError("weight vector cannot be empty")
        vals = np.asarray(list(entries.values()), dtype=np.float64)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise WeightError("weights must be finite and >= 0")
        if not np.any(vals > 0):
            raise WeightError("at least one weight must be > 0")
        total = float(vals.sum())
        if abs(total - len(vals)) > _NORM_TOL * max(1.0, len(vals)):
            raise WeightError(
                f"weights must sum to the QI count ({len(vals)}), got {total}"
            )
        self.entries: dict[str, float] = {k: float(v) for k, v in entries.items()}

    @classmethod
    def normalized(cls, raw: Mapping[str, float]) -> "WeightVector":
        """Rescale arbitrary nonnegative weights to the sum convention."""
        if not raw:
            raise WeightError("weight vector cannot be empty")
        vals = np.asarray(list(raw.values()), dtype=np.float64)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise WeightError("weights must be finite and >= 0")
        total = float(vals.sum())
        if total <= 0:
            raise WeightError("at least one weight must be > 0")
        scale = len(vals) / total
        return cls({k: float(v) * scale for k, v in raw.items()})

    @property
    def names(self) -> list[str]:
        return list(self.entries)

    def as_array(self, order: Sequence[str] | None = None) -> np.ndarray:
        names = self.names if order is None else list(order)
        missing = [n for n in names if n not in self.entries]
        if missing:
            raise WeightError(f"weight vector is missing QIs: {missing}")
        return np.asarray([self.entries[n] for n in names], dtype=np.float64)

    def __getitem__(self, name: str) -> float:
        try:
            return self.entries[name]
        except KeyError:
            raise WeightError(f"weight vector is missing QI {name!r}") from None

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightVector) and self.entries == other.entries

    def __repr__(self) -> str:  # pragma: no cover
        inner = ", ".join(f"{k}={v:.4g}" for k, v in self.entries.items())
        return f"WeightVector({inner})"


def equal_weights(qis: Sequence[str]) -> WeightVector:
    """Uniform importance: every weight exactly 1."""
    if not qis:
        raise WeightError("QI list cannot be empty")
    return WeightVector({name: 1.0 for name in qis})


def bias_weights(raw: Mapping[str, float]) -> WeightVector:
    """Slider positions in [0,1] rescaled to the normalization convention."""
    if not raw:
        raise WeightError("slider map cannot be empty")
    for name, v in raw.items():
        if not np.isfinite(v) or v < 0.0 or v > 1.0:
            raise RangeError(f"slider for {name!r} must lie in [0, 1], got {v}")
    total = float(sum(raw.values()))
    if total <= 0:
        raise WeightError("all sliders are zero; at least one must be > 0")
    scale = len(raw) / total
    return WeightVector({name: float(v) * scale for name, v in raw.items()})


def iml_update(
    w: WeightVector,
    costs: np.ndarray,
    chosen: int,
    p: UpdateParams = UpdateParams(),
) -> WeightVector:
    """Multiplicative weight update from one interactive choice.

    `costs` is a (candidates x QIs) matrix of per-attribute plain
    information-loss increments, columns aligned with `w.names`. Attributes
    the chosen candidate kept relatively specific (cheap) gain weight.
    """
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2:
        raise UpdateError("costs must be a 2-D candidates x QIs matrix")
    n_cand, n_qi = costs.shape
    if n_qi != len(w):
        raise UpdateError(
            f"costs have {n_qi} columns but the weight vector has {len(w)} QIs"
        )
    if n_cand < 2:
        raise UpdateError("need at least 2 candidates to learn from a choice")
    if not 0 <= chosen < n_cand:
        raise UpdateError(f"chosen index {chosen} out of range for {n_cand} candidates")
    if np.any(costs < 0) or not np.all(np.isfinite(costs)):
        raise UpdateError("costs must be finite and >= 0")

    col_max = costs.max(axis=0)
    g_hat = costs / (col_max + p.epsilon)
    multipliers = np.exp(p.eta * (g_hat.mean(axis=0) - g_hat[chosen]))
    updated = np.maximum(w.as_array() * multipliers, p.floor)
    updated *= n_qi / updated.sum()
    return WeightVector({name: float(v) for name, v in zip(w.names, updated)})
