#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the greedy-step delta evaluation and the tree split searches on
synthetic problems of increasing size, and checks that both backends agree
bit-for-bit on the values that drive decisions.

Run: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from anonforge.kernels import numba_backend as nb
from anonforge.kernels import numpy_backend as npk


def synth_problem(n: int, s: int = 3, t: int = 7, seed: int = 0):
    rng = np.random.default_rng(seed)
    num_vals = rng.uniform(0, 100, size=(n, s))
    # small star-shaped hierarchies: root + g groups + leaves
    lca_parts, h_parts, ncs = [], [], []
    cat_codes = np.zeros((n, t), dtype=np.int32)
    for j in range(t):
        groups = int(rng.integers(2, 5))
        leaves_per = int(rng.integers(2, 6))
        nc = 1 + groups + groups * leaves_per
        parent = np.zeros(nc, dtype=np.int64)
        depth = np.zeros(nc, dtype=np.int64)
        height = np.zeros(nc, dtype=np.float64)
        leaf_ids = []
        idx = 1
        for g in range(groups):
            gid = idx
            parent[gid], depth[gid], height[gid] = 0, 1, 1
            idx += 1
            for _ in range(leaves_per):
                parent[idx], depth[idx], height[idx] = gid, 2, 0
                leaf_ids.append(idx)
                idx += 1
        height[0] = 2

        def lca(a, b):
            while a != b:
                if depth[a] < depth[b]:
                    b = parent[b]
                else:
                    a = parent[a]
            return a

        table = np.empty((nc, nc), dtype=np.int32)
        for a in range(nc):
            for b in range(nc):
                table[a, b] = lca(a, b)
        lca_parts.append(table.ravel())
        h_parts.append(height)
        ncs.append(nc)
        cat_codes[:, j] = rng.choice(leaf_ids, size=n)

    cat_nc = np.asarray(ncs, dtype=np.int64)
    lca_off = np.zeros(t + 1, dtype=np.int64)
    h_off = np.zeros(t + 1, dtype=np.int64)
    for j in range(t):
        lca_off[j + 1] = lca_off[j] + ncs[j] * ncs[j]
        h_off[j + 1] = h_off[j] + ncs[j]
    return dict(
        num_vals=num_vals,
        cat_codes=cat_codes,
        inv_num_range=1.0 / (num_vals.max(axis=0) - num_vals.min(axis=0)),
        lca_flat=np.concatenate(lca_parts).astype(np.int32),
        lca_off=lca_off,
        cat_nc=cat_nc,
        h_flat=np.concatenate(h_parts),
        h_off=h_off,
        inv_tree_h=np.full(t, 0.5),
        w_num=np.ones(s),
        w_cat=np.ones(t),
        lo=num_vals[0].copy(),
        hi=num_vals[0].copy(),
        gen=cat_codes[0].copy(),
        size=1.0,
    )


def bench(fn, reps, *args):
    fn(*args)  # warm-up / JIT compile
    t0 = time.perf_counter()
    for _ in range(reps):
        out = fn(*args)
    return (time.perf_counter() - t0) / reps, out


def main():
    print(f"{'kernel':<18}{'n':>8}{'numpy':>12}{'numba':>12}{'speedup':>9}  match")
    for n in (500, 2000, 8000):
        p = synth_problem(n)
        cand = np.arange(n, dtype=np.int64)
        args = (p["num_vals"], p["cat_codes"], p["inv_num_range"],
                p["lca_flat"], p["lca_off"], p["cat_nc"], p["h_flat"],
                p["h_off"], p["inv_tree_h"], p["w_num"], p["w_cat"],
                p["lo"], p["hi"], p["gen"], p["size"], cand)
        t_np, out_np = bench(npk.delta_all, 20, *args)
        t_nb, out_nb = bench(nb.delta_all, 20, *args)
        match = bool(np.array_equal(out_np, out_nb))
        print(f"{'delta_all':<18}{n:>8}{t_np*1e3:>10.2f}ms{t_nb*1e3:>10.2f}ms"
              f"{t_np/t_nb:>8.1f}x  {match}")

    rng = np.random.default_rng(1)
    for n in (500, 2000, 8000):
        X = rng.uniform(0, 1, size=(n, 30))
        y = rng.integers(0, 2, size=n)
        idx = np.arange(n, dtype=np.int64)
        t_np, out_np = bench(npk.best_split_gini, 5, X, y, idx, 2)
        t_nb, out_nb = bench(nb.best_split_gini, 5, X, y, idx, 2)
        match = out_np == out_nb
        print(f"{'best_split_gini':<18}{n:>8}{t_np*1e3:>10.2f}ms{t_nb*1e3:>10.2f}ms"
              f"{t_np/t_nb:>8.1f}x  {match}")

        g = rng.normal(size=n)
        t_np, out_np = bench(npk.best_split_sse, 5, X, g, idx)
        t_nb, out_nb = bench(nb.best_split_sse, 5, X, g, idx)
        match = out_np == out_nb
        print(f"{'best_split_sse':<18}{n:>8}{t_np*1e3:>10.2f}ms{t_nb*1e3:>10.2f}ms"
              f"{t_np/t_nb:>8.1f}x  {match}")


if __name__ == "__main__":
    main()
