"""Pure-numpy kernel implementations (the fallback backend).

Accumulation order mirrors the numba backend exactly (numeric attributes
first, then categorical, sequential over attributes) so both backends
produce bit-identical floats and therefore identical greedy decisions.
"""

from __future__ import annotations

import numpy as np


def delta_all(
    num_vals: np.ndarray,       # (n, s) float64
    cat_codes: np.ndarray,      # (n, t) int32
    inv_num_range: np.ndarray,  # (s,)   1/range(X), 0 where range is 0
    lca_flat: np.ndarray,       # int32, concatenated per-attribute lca tables
    lca_off: np.ndarray,        # (t+1,) int64 offsets into lca_flat
    cat_nc: np.ndarray,         # (t,)   int64 node counts (table strides)
    h_flat: np.ndarray,         # float64, concatenated per-node subtree heights
    h_off: np.ndarray,          # (t+1,) int64 offsets into h_flat
    inv_tree_h: np.ndarray,     # (t,)   1/height(tree)
    w_num: np.ndarray,          # (s,)   weights of numeric QIs
    w_cat: np.ndarray,          # (t,)   weights of categorical QIs
    lo: np.ndarray,             # (s,)   cluster interval lows
    hi: np.ndarray,             # (s,)   cluster interval highs
    gen: np.ndarray,            # (t,)   cluster generalization node ids
    size: float,                # |cluster|
    cand: np.ndarray,           # (c,)   candidate record indices
) -> np.ndarray:
    """Weighted information-loss increase of adding each candidate."""
    total = np.zeros(cand.shape[0], dtype=np.float64)
    size1 = size + 1.0
    for j in range(num_vals.shape[1]):
        x = num_vals[cand, j]
        new_lo = np.minimum(lo[j], x)
        new_hi = np.maximum(hi[j], x)
        term_new = (new_hi - new_lo) * inv_num_range[j]
        term_old = (hi[j] - lo[j]) * inv_num_range[j]
        total += w_num[j] * (size1 * term_new - size * term_old)
    for j in range(cat_codes.shape[1]):
        codes = cat_codes[cand, j]
        merged = lca_flat[lca_off[j] + gen[j] * cat_nc[j] + codes]
        term_new = h_flat[h_off[j] + merged] * inv_tree_h[j]
        term_old = h_flat[h_off[j] + gen[j]] * inv_tree_h[j]
        total += w_cat[j] * (size1 * term_new - size * term_old)
    return total


def per_attribute_costs(
    num_vals, cat_codes, inv_num_range,
    lca_flat, lca_off, cat_nc, h_flat, h_off, inv_tree_h,
    lo, hi, gen, size, cand,
) -> np.ndarray:
    """Plain (unweighted) per-attribute increments, shape (c, s + t).

    Columns are numeric attributes first, then categorical — callers remap
    to schema order."""
    s = num_vals.shape[1]
    t = cat_codes.shape[1]
    out = np.zeros((cand.shape[0], s + t), dtype=np.float64)
    size1 = size + 1.0
    for j in range(s):
        x = num_vals[cand, j]
        new_lo = np.minimum(lo[j], x)
        new_hi = np.maximum(hi[j], x)
        term_new = (new_hi - new_lo) * inv_num_range[j]
        term_old = (hi[j] - lo[j]) * inv_num_range[j]
        out[:, j] = size1 * term_new - size * term_old
    for j in range(t):
        codes = cat_codes[cand, j]
        merged = lca_flat[lca_off[j] + gen[j] * cat_nc[j] + codes]
        term_new = h_flat[h_off[j] + merged] * inv_tree_h[j]
        term_old = h_flat[h_off[j] + gen[j]] * inv_tree_h[j]
        out[:, s + j] = size1 * term_new - size * term_old
    return out


def best_split_gini(
    X: np.ndarray,        # (N, F) float64
    y: np.ndarray,        # (N,)   int64 class codes in [0, n_classes)
    idx: np.ndarray,      # (m,)   sample indices at this node
    n_classes: int,
) -> tuple[int, float, float]:
    """Best (feature, threshold, weighted-gini) over all features.

    Thresholds are midpoints between consecutive distinct values; ties are
    broken toward the lowest feature index then lowest threshold. Returns
    feature == -1 when no split exists.
    """
    m = idx.shape[0]
    mf = float(m)
    ys = y[idx]
    total_counts = np.bincount(ys, minlength=n_classes).astype(np.float64)
    best_f, best_thr, best_imp = -1, 0.0, np.inf
    for f in range(X.shape[1]):
        vals = X[idx, f]
        order = np.argsort(vals, kind="mergesort")
        sv = vals[order]
        sy = ys[order]
        distinct = sv[1:] != sv[:-1]
        if not np.any(distinct):
            continue
        onehot = np.zeros((m, n_classes), dtype=np.float64)
        onehot[np.arange(m), sy] = 1.0
        left = np.cumsum(onehot, axis=0)[:-1]
        cut = np.flatnonzero(distinct)
        nl = (cut + 1).astype(np.float64)
        nr = mf - nl
        lc = left[cut]
        rc = total_counts[None, :] - lc
        # class loop kept sequential so the accumulation order matches the
        # numba backend bit-for-bit
        acc_l = np.zeros(cut.shape[0], dtype=np.float64)
        acc_r = np.zeros(cut.shape[0], dtype=np.float64)
        for c in range(n_classes):
            ql = lc[:, c] / nl
            qr = rc[:, c] / nr
            acc_l += ql * ql
            acc_r += qr * qr
        imp = (nl * (1.0 - acc_l) + nr * (1.0 - acc_r)) / mf
        i = int(np.argmin(imp))
        if imp[i] < best_imp:
            best_imp = float(imp[i])
            best_f = f
            best_thr = float(sv[cut[i]] + 0.5 * (sv[cut[i] + 1] - sv[cut[i]]))
    return best_f, best_thr, best_imp


def best_split_sse(
    X: np.ndarray,     # (N, F) float64
    g: np.ndarray,     # (N,)   float64 regression targets
    idx: np.ndarray,   # (m,)   sample indices
) -> tuple[int, float]:
    """Best (feature, threshold) minimizing two-segment squared error.

    Equivalent to maximizing S_l^2/n_l + S_r^2/n_r. Returns feature == -1
    when every feature is constant on the node.
    """
    m = idx.shape[0]
    gs_all = g[idx]
    total = _sequential_sum(gs_all)
    best_f, best_thr, best_score = -1, 0.0, -np.inf
    for f in range(X.shape[1]):
        vals = X[idx, f]
        order = np.argsort(vals, kind="mergesort")
        sv = vals[order]
        sg = gs_all[order]
        distinct = sv[1:] != sv[:-1]
        if not np.any(distinct):
            continue
        prefix = np.cumsum(sg)[:-1]
        cut = np.flatnonzero(distinct)
        nl = (cut + 1).astype(np.float64)
        nr = m - nl
        sl = prefix[cut]
        sr = total - sl
        score = sl * sl / nl + sr * sr / nr
        i = int(np.argmax(score))
        if score[i] > best_score:
            best_score = float(score[i])
            best_f = f
            best_thr = float(sv[cut[i]] + 0.5 * (sv[cut[i] + 1] - sv[cut[i]]))
    return best_f, best_thr


def _sequential_sum(a: np.ndarray) -> float:
    # cumsum is a sequential scan; its last element matches the numba
    # backend's running total bit-for-bit (np.sum would use pairwise blocks)
    return float(np.cumsum(a)[-1]) if a.size else 0.0
