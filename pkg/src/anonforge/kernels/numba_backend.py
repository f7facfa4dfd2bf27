"""Numba-compiled kernels (the default backend).

Same arithmetic, same operation order as `numpy_backend`; fastmath stays
off so both backends agree bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def delta_all(
    num_vals, cat_codes, inv_num_range,
    lca_flat, lca_off, cat_nc, h_flat, h_off, inv_tree_h,
    w_num, w_cat, lo, hi, gen, size, cand,
):
    s = num_vals.shape[1]
    t = cat_codes.shape[1]
    out = np.zeros(cand.shape[0], dtype=np.float64)
    size1 = size + 1.0
    for i in range(cand.shape[0]):
        r = cand[i]
        acc = 0.0
        for j in range(s):
            x = num_vals[r, j]
            lo_j = lo[j]
            hi_j = hi[j]
            new_lo = min(lo_j, x)
            new_hi = max(hi_j, x)
            term_new = (new_hi - new_lo) * inv_num_range[j]
            term_old = (hi_j - lo_j) * inv_num_range[j]
            acc += w_num[j] * (size1 * term_new - size * term_old)
        for j in range(t):
            code = cat_codes[r, j]
            merged = lca_flat[lca_off[j] + gen[j] * cat_nc[j] + code]
            term_new = h_flat[h_off[j] + merged] * inv_tree_h[j]
            term_old = h_flat[h_off[j] + gen[j]] * inv_tree_h[j]
            acc += w_cat[j] * (size1 * term_new - size * term_old)
        out[i] = acc
    return out


@njit(cache=True)
def per_attribute_costs(
    num_vals, cat_codes, inv_num_range,
    lca_flat, lca_off, cat_nc, h_flat, h_off, inv_tree_h,
    lo, hi, gen, size, cand,
):
    s = num_vals.shape[1]
    t = cat_codes.shape[1]
    out = np.zeros((cand.shape[0], s + t), dtype=np.float64)
    size1 = size + 1.0
    for i in range(cand.shape[0]):
        r = cand[i]
        for j in range(s):
            x = num_vals[r, j]
            lo_j = lo[j]
            hi_j = hi[j]
            new_lo = min(lo_j, x)
            new_hi = max(hi_j, x)
            term_new = (new_hi - new_lo) * inv_num_range[j]
            term_old = (hi_j - lo_j) * inv_num_range[j]
            out[i, j] = size1 * term_new - size * term_old
        for j in range(t):
            code = cat_codes[r, j]
            merged = lca_flat[lca_off[j] + gen[j] * cat_nc[j] + code]
            term_new = h_flat[h_off[j] + merged] * inv_tree_h[j]
            term_old = h_flat[h_off[j] + gen[j]] * inv_tree_h[j]
            out[i, s + j] = size1 * term_new - size * term_old
    return out


@njit(cache=True)
def best_split_gini(X, y, idx, n_classes):
    m = idx.shape[0]
    mf = float(m)
    total_counts = np.zeros(n_classes, dtype=np.float64)
    for i in range(m):
        total_counts[y[idx[i]]] += 1.0
    best_f = -1
    best_thr = 0.0
    best_imp = np.inf
    vals = np.empty(m, dtype=np.float64)
    left = np.empty(n_classes, dtype=np.float64)
    for f in range(X.shape[1]):
        for i in range(m):
            vals[i] = X[idx[i], f]
        order = np.argsort(vals, kind="mergesort")
        for c in range(n_classes):
            left[c] = 0.0
        for i in range(m - 1):
            o = order[i]
            left[y[idx[o]]] += 1.0
            v = vals[o]
            v_next = vals[order[i + 1]]
            if v == v_next:
                continue
            nl = float(i + 1)
            nr = mf - nl
            acc_l = 0.0
            acc_r = 0.0
            for c in range(n_classes):
                ql = left[c] / nl
                qr = (total_counts[c] - left[c]) / nr
                acc_l += ql * ql
                acc_r += qr * qr
            imp = (nl * (1.0 - acc_l) + nr * (1.0 - acc_r)) / mf
            if imp < best_imp:
                best_imp = imp
                best_f = f
                best_thr = v + 0.5 * (v_next - v)
    return best_f, best_thr, best_imp


@njit(cache=True)
def best_split_sse(X, g, idx):
    m = idx.shape[0]
    mf = float(m)
    total = 0.0
    for i in range(m):
        total += g[idx[i]]
    best_f = -1
    best_thr = 0.0
    best_score = -np.inf
    vals = np.empty(m, dtype=np.float64)
    for f in range(X.shape[1]):
        for i in range(m):
            vals[i] = X[idx[i], f]
        order = np.argsort(vals, kind="mergesort")
        prefix = 0.0
        for i in range(m - 1):
            o = order[i]
            prefix += g[idx[o]]
            v = vals[o]
            v_next = vals[order[i + 1]]
            if v == v_next:
                continue
            nl = float(i + 1)
            nr = mf - nl
            sl = prefix
            sr = total - sl
            score = sl * sl / nl + sr * sr / nr
            if score > best_score:
                best_score = score
                best_f = f
                best_thr = v + 0.5 * (v_next - v)
    return best_f, best_thr
