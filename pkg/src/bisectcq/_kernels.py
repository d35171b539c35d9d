"""Hot enumeration and sampling kernels, with numba and pure-numpy paths.

The numba path is the default.  Set the environment variable
``BISECTCQ_NO_NUMBA=1`` to force the pure-numpy fallback (or it is used
automatically when numba is unavailable).  Both paths produce bit-identical
results given the same inputs; ``benchmarks/bench_kernels.py`` compares
their throughput.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("BISECTCQ_NO_NUMBA", "") not in ("", "0")

if not _DISABLED:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


def using_numba() -> bool:
    """True when the compiled kernel path is active."""
    return HAVE_NUMBA


def _sequence_value_sums_numpy(tables: np.ndarray) -> np.ndarray:
    """Sum tables[i, x_i] over all sequences x, lexicographic order.

    ``tables`` has shape (n, d); the result has length d**n with the first
    position as the most significant digit.
    """
    out = np.zeros(1)
    for row in tables:
        out = np.add.outer(out, row).ravel()
    return out


def _tail_counts_numpy(cum_q: np.ndarray, neg_log_q: np.ndarray, uniforms: np.ndarray,
                       center: float, delta: float) -> int:
    """Count samples whose mean -log2 q deviates from ``center`` by >= delta.

    ``uniforms`` has shape (samples, n); each row is mapped to a symbol
    sequence through the cumulative distribution ``cum_q``.
    """
    symbols = np.minimum(np.searchsorted(cum_q, uniforms, side="left"), cum_q.shape[0] - 1)
    means = neg_log_q[symbols].mean(axis=1)
    return int(np.count_nonzero(np.abs(means - center) >= delta))


if HAVE_NUMBA:

    @njit(cache=True)
    def _sequence_value_sums_numba(tables):  # pragma: no cover - compiled
        n, d = tables.shape
        total = 1
        for _ in range(n):
            total *= d
        out = np.zeros(total)
        # add one row at a time over contiguous blocks, most-significant
        # position first, matching the iterative outer-sum order of the
        # numpy path bit for bit
        block = total
        for i in range(n):
            block //= d
            pos = 0
            while pos < total:
                for sym in range(d):
                    v = tables[i, sym]
                    for k in range(pos, pos + block):
                        out[k] += v
                    pos += block
        return out

    @njit(cache=True)
    def _tail_counts_numba(cum_q, neg_log_q, uniforms, center, delta):  # pragma: no cover
        samples, n = uniforms.shape
        d = cum_q.shape[0]
        count = 0
        for s in range(samples):
            acc = 0.0
            for i in range(n):
                u = uniforms[s, i]
                sym = 0
                while sym < d - 1 and u > cum_q[sym]:
                    sym += 1
                acc += neg_log_q[sym]
            if abs(acc / n - center) >= delta:
                count += 1
        return count


def sequence_value_sums(tables: np.ndarray) -> np.ndarray:
    """Dispatch to the active kernel path."""
    tables = np.ascontiguousarray(tables, dtype=np.float64)
    if HAVE_NUMBA:
        return _sequence_value_sums_numba(tables)
    return _sequence_value_sums_numpy(tables)


def tail_counts(cum_q: np.ndarray, neg_log_q: np.ndarray, uniforms: np.ndarray,
                center: float, delta: float) -> int:
    """Dispatch to the active kernel path."""
    cum_q = np.ascontiguousarray(cum_q, dtype=np.float64)
    neg_log_q = np.ascontiguousarray(neg_log_q, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    if HAVE_NUMBA:
        return int(_tail_counts_numba(cum_q, neg_log_q, uniforms, center, delta))
    return _tail_counts_numpy(cum_q, neg_log_q, uniforms, center, delta)
