"""The four classifier families, implemented natively on numpy.

Linear models run full-batch (sub)gradient descent on internally
standardized features; the tree models share the split-search kernels.
Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import EvalError


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0)))


class _Standardizer:
    def fit(self, X: np.ndarray) -> "_Standardizer":
        self.mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0.0] = 1.0
        self.sd = sd
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mu) / self.sd


def _check_Xy(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise EvalError("X must be 2-D and aligned with y")
    if len(X) == 0:
        raise EvalError("empty training set")
    return X, y


class _OneVsRestLinear:
    """Shared scaffolding for the two linear models (OvR over classes)."""

    def __init__(self, learning_rate: float, epochs: int, l2: float):
        self.lr = learning_rate
        self.epochs = epochs
        self.l2 = l2

    def fit(self, X, y):
        X, y = _check_Xy(X, y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        if len(self.classes_) == 1:
            self.degenerate_ = True
            return self
        self.degenerate_ = False
        self.scaler_ = _Standardizer().fit(X)
        Xb = self._with_bias(self.scaler_.transform(X))
        self.coef_ = np.stack(
            [self._fit_binary(Xb, (codes == c).astype(np.float64))
             for c in range(len(self.classes_))]
        )
        return self

    @staticmethod
    def _with_bias(X: np.ndarray) -> np.ndarray:
        return np.hstack([np.ones((len(X), 1)), X])

    def decision_scores(self, X) -> np.ndarray:
        Xb = self._with_bias(self.scaler_.transform(np.asarray(X, dtype=np.float64)))
        return Xb @ self.coef_.T

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.degenerate_:
            return np.full(len(X), self.classes_[0])
        return self.classes_[np.argmax(self.decision_scores(X), axis=1)]


class LogisticRegressionGD(_OneVsRestLinear):
    """L2-regularized logistic regression, full-batch gradient descent."""

    def _fit_binary(self, Xb: np.ndarray, y01: np.ndarray) -> np.ndarray:
        n = len(Xb)
        w = np.zeros(Xb.shape[1])
        reg_mask = np.ones_like(w)
        reg_mask[0] = 0.0  # bias unregularized
        for _ in range(self.epochs):
            p = _sigmoid(Xb @ w)
            grad = Xb.T @ (p - y01) / n + self.l2 * reg_mask * w
            w -= self.lr * grad
        return w


class LinearSVCSubgradient(_OneVsRestLinear):
    """Hinge loss minimized by full-batch subgradient descent."""

    def _fit_binary(self, Xb: np.ndarray, y01: np.ndarray) -> np.ndarray:
        n = len(Xb)
        y_pm = 2.0 * y01 - 1.0
        w = np.zeros(Xb.shape[1])
        reg_mask = np.ones_like(w)
        reg_mask[0] = 0.0
        for _ in range(self.epochs):
            margins = y_pm * (Xb @ w)
            active = (margins < 1.0).astype(np.float64)
            grad = self.l2 * reg_mask * w - Xb.T @ (y_pm * active) / n
            w -= self.lr * grad
        return w


class DecisionTreeGini:
    """CART classification tree stored as flat node arrays."""

    def __init__(self, max_depth: int = 8, min_samples_split: int = 2,
                 max_features: int | None = None, rng: np.random.Generator | None = None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.rng = rng

    def fit(self, X: np.ndarray, codes: np.ndarray, n_classes: int):
        X = np.asarray(X, dtype=np.float64)
        codes = np.asarray(codes, dtype=np.int64)
        feature, threshold, left, right, leaf_class = [], [], [], [], []

        def gini_of(counts: np.ndarray, m: int) -> float:
            q = counts / m
            return 1.0 - float(q @ q)

        def new_node() -> int:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            leaf_class.append(-1)
            return len(feature) - 1

        stack = [(new_node(), np.arange(len(X)), 0)]
        while stack:
            nid, idx, depth = stack.pop()
            counts = np.bincount(codes[idx], minlength=n_classes)
            majority = int(np.argmax(counts))
            if (
                depth >= self.max_depth
                or len(idx) < self.min_samples_split
                or counts.max() == len(idx)
            ):
                leaf_class[nid] = majority
                continue
            cols = self._feature_subset(X.shape[1])
            X_view = X if len(cols) == X.shape[1] else np.ascontiguousarray(X[:, cols])
            f, thr, imp = kernels.best_split_gini(X_view, codes, idx, n_classes)
            if f < 0 or imp >= gini_of(counts, len(idx)):
                leaf_class[nid] = majority
                continue
            f = int(cols[f])
            mask = X[idx, f] <= thr
            feature[nid] = f
            threshold[nid] = thr
            lid, rid = new_node(), new_node()
            left[nid], right[nid] = lid, rid
            stack.append((rid, idx[~mask], depth + 1))
            stack.append((lid, idx[mask], depth + 1))

        self.feature_ = np.asarray(feature, dtype=np.int64)
        self.threshold_ = np.asarray(threshold, dtype=np.float64)
        self.left_ = np.asarray(left, dtype=np.int64)
        self.right_ = np.asarray(right, dtype=np.int64)
        self.leaf_class_ = np.asarray(leaf_class, dtype=np.int64)
        return self

    def _feature_subset(self, n_features: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= n_features:
            return np.arange(n_features)
        return np.sort(self.rng.choice(n_features, self.max_features, replace=False))

    def predict_codes(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(len(X), dtype=np.int64)
        stack = [(0, np.arange(len(X)))]
        while stack:
            nid, idx = stack.pop()
            if len(idx) == 0:
                continue
            if self.feature_[nid] < 0:
                out[idx] = self.leaf_class_[nid]
                continue
            mask = X[idx, self.feature_[nid]] <= self.threshold_[nid]
            stack.append((self.left_[nid], idx[mask]))
            stack.append((self.right_[nid], idx[~mask]))
        return out


class RandomForestGini:
    """Bagged CART trees, majority vote."""

    def __init__(self, n_trees=50, max_depth=8, bootstrap_fraction=1.0,
                 max_features=None, min_samples_split=2, seed=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.bootstrap_fraction = bootstrap_fraction
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.seed = seed

    def fit(self, X, y):
        X, y = _check_Xy(X, y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        if len(self.classes_) == 1:
            self.degenerate_ = True
            return self
        self.degenerate_ = False
        rng = np.random.default_rng(self.seed)
        n = len(X)
        n_boot = max(1, int(round(self.bootstrap_fraction * n)))
        self.trees_ = []
        for _ in range(self.n_trees):
            boot = rng.integers(0, n, size=n_boot)
            tree = DecisionTreeGini(
                self.max_depth, self.min_samples_split, self.max_features, rng
            )
            tree.fit(X[boot], codes[boot], len(self.classes_))
            self.trees_.append(tree)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.degenerate_:
            return np.full(len(X), self.classes_[0])
        votes = np.zeros((len(X), len(self.classes_)), dtype=np.int64)
        for tree in self.trees_:
            votes[np.arange(len(X)), tree.predict_codes(X)] += 1
        return self.classes_[np.argmax(votes, axis=1)]


class GradientBoostingStumps:
    """Additive depth-1 regression trees fit to the logistic-loss gradient,
    one-vs-rest for multiclass."""

    def __init__(self, n_stumps=100, shrinkage=0.1, seed=0):
        self.n_stumps = n_stumps
        self.shrinkage = shrinkage
        self.seed = seed  # unused: the fit is deterministic

    def fit(self, X, y):
        X, y = _check_Xy(X, y)
        self.classes_, codes = np.unique(y, return_inverse=True)
        if len(self.classes_) == 1:
            self.degenerate_ = True
            return self
        self.degenerate_ = False
        self.models_ = [
            self._fit_binary(X, (codes == c).astype(np.float64))
            for c in range(len(self.classes_))
        ]
        return self

    def _fit_binary(self, X, y01):
        n = len(X)
        p0 = min(max(float(y01.mean()), 1e-6), 1.0 - 1e-6)
        f0 = float(np.log(p0 / (1.0 - p0)))
        F = np.full(n, f0)
        idx = np.arange(n, dtype=np.int64)
        stumps = []
        for _ in range(self.n_stumps):
            p = _sigmoid(F)
            g = y01 - p
            f, thr = kernels.best_split_sse(X, g, idx)
            if f < 0:
                gamma = self._newton(g, p)
                stumps.append((-1, 0.0, gamma, gamma))
                F += self.shrinkage * gamma
                continue
            mask = X[:, f] <= thr
            gamma_l = self._newton(g[mask], p[mask])
            gamma_r = self._newton(g[~mask], p[~mask])
            stumps.append((f, thr, gamma_l, gamma_r))
            F += self.shrinkage * np.where(mask, gamma_l, gamma_r)
        return f0, stumps

    @staticmethod
    def _newton(g: np.ndarray, p: np.ndarray) -> float:
        denom = float((p * (1.0 - p)).sum())
        return float(g.sum()) / max(denom, 1e-12)

    def _score_binary(self, model, X):
        f0, stumps = model
        F = np.full(len(X), f0)
        for f, thr, gl, gr in stumps:
            if f < 0:
                F += self.shrinkage * gl
            else:
                F += self.shrinkage * np.where(X[:, f] <= thr, gl, gr)
        return F

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.degenerate_:
            return np.full(len(X), self.classes_[0])
        scores = np.stack([self._score_binary(m, X) for m in self.models_], axis=1)
        return self.classes_[np.argmax(scores, axis=1)]
