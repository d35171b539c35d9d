"""Throughput comparison of the compiled and pure-numpy kernel paths.

Run with ``python benchmarks/bench_kernels.py``.  The same comparison can be
forced package-wide by setting ``BISECTCQ_NO_NUMBA=1`` before import; here we
call both implementations directly and verify they agree bit for bit.
"""

import time

import numpy as np

from bisectcq import _kernels


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return out, best


def bench_sequence_value_sums():
    print("sequence_value_sums (tables -> d^n lexicographic sums)")
    rng = np.random.default_rng(0)
    for n, d in ((12, 2), (16, 2), (20, 2), (10, 3)):
        tables = rng.uniform(0.1, 4.0, size=(n, d))
        ref, t_numpy = timeit(_kernels._sequence_value_sums_numpy, tables)
        if _kernels.HAVE_NUMBA:
            got, t_numba = timeit(_kernels._sequence_value_sums_numba, tables)
            assert np.array_equal(got, ref)
            print(f"  d={d} n={n:>2} ({d ** n:>9} seqs): "
                  f"numpy {t_numpy * 1e3:8.2f} ms, numba {t_numba * 1e3:8.2f} ms, "
                  f"speedup {t_numpy / t_numba:5.1f}x")
        else:
            print(f"  d={d} n={n:>2}: numpy {t_numpy * 1e3:8.2f} ms (numba inactive)")


def bench_tail_counts():
    print("tail_counts (Monte Carlo sample-entropy deviation counting)")
    rng = np.random.default_rng(1)
    q = np.array([0.9, 0.1])
    cum_q = np.cumsum(q)
    neg_log_q = -np.log2(q)
    center = float((q * neg_log_q).sum())
    for samples, n in ((10_000, 20), (100_000, 20), (100_000, 40)):
        uniforms = rng.random((samples, n))
        ref, t_numpy = timeit(_kernels._tail_counts_numpy,
                              cum_q, neg_log_q, uniforms, center, 0.2)
        if _kernels.HAVE_NUMBA:
            got, t_numba = timeit(_kernels._tail_counts_numba,
                                  cum_q, neg_log_q, uniforms, center, 0.2)
            assert int(got) == int(ref)
            print(f"  {samples:>7} x n={n}: "
                  f"numpy {t_numpy * 1e3:8.2f} ms, numba {t_numba * 1e3:8.2f} ms, "
                  f"speedup {t_numpy / t_numba:5.1f}x")
        else:
            print(f"  {samples:>7} x n={n}: numpy {t_numpy * 1e3:8.2f} ms "
                  f"(numba inactive)")


if __name__ == "__main__":
    print(f"compiled path active: {_kernels.using_numba()}")
    bench_sequence_value_sums()
    bench_tail_counts()
