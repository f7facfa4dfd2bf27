"""Hot numeric kernels with two interchangeable backends.

`ANONFORGE_KERNELS` selects the implementation:

* ``auto`` (default) — numba-compiled kernels when numba imports, else numpy
* ``numba`` — require the compiled kernels
* ``numpy`` — force the pure-numpy fallback

Both backends compute bit-identical results (same operation order); the
partition produced by the greedy clustering does not depend on the choice.
`benchmarks/bench_kernels.py` compares their throughput.
"""

from __future__ import annotations

import os


def _select():
    choice = os.environ.get("ANONFORGE_KERNELS", "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"ANONFORGE_KERNELS must be auto|numba|numpy, got {choice!r}"
        )
    if choice in ("auto", "numba"):
        try:
            from . import numba_backend as impl

            return impl, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import numpy_backend as impl

    return impl, "numpy"


_impl, BACKEND = _select()

delta_all = _impl.delta_all
per_attribute_costs = _impl.per_attribute_costs
best_split_gini = _impl.best_split_gini
best_split_sse = _impl.best_split_sse


def backend_name() -> str:
    return BACKEND
