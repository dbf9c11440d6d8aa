#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot kernels on realistic shapes and cross-checks that the
two backends agree. Run from the repo root:

    python benchmarks/bench_backends.py
"""
import time

import numpy as np

from papr_lab import kernels
from papr_lab.constellation import build_constellation, sample_block
from papr_lab.waveform import OfdmConfig

QAM16 = build_constellation("qam16")


def timeit(fn, reps):
    fn()  # warm (JIT compile / cache touch)
    t0 = time.perf_counter()
    for _ in range(reps):
        out = fn()
    return (time.perf_counter() - t0) / reps, out


def bench_selection(n, shots, reps):
    cfg = OfdmConfig(n, QAM16, 4)
    rng = np.random.default_rng(1)
    w = sample_block(QAM16, n, rng) * cfg.cf_scale
    tails = rng.integers(0, 2, kernels.tail_sign_count(n, 1, shots, True), dtype=np.int8) * 2 - 1
    results = {}
    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        dt, out = timeit(lambda: kernels.select_block(w, cfg.grid_size, 1, shots, tails, True), reps)
        results[backend] = (dt, out)
    (ta, (sa, pa, _)), (tb, (sb, pb, _)) = results["numba"], results["numpy"]
    agree = np.array_equal(sa, sb) and np.allclose(pa, pb, rtol=1e-9)
    print(f"selection  n={n:<4d} shots={shots:<4d} "
          f"numba {ta*1e3:8.1f} ms   numpy {tb*1e3:8.1f} ms   "
          f"speedup {tb/ta:4.1f}x   agree={agree}")


def bench_exact(n, reps):
    cfg = OfdmConfig(n, QAM16, 4)
    rng = np.random.default_rng(2)
    w = sample_block(QAM16, n, rng) * cfg.cf_scale
    prefix = np.ones(1, dtype=np.int8)
    vals = {}
    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        dt, out = timeit(lambda: kernels.exact_cf(w, cfg.grid_size, prefix), reps)
        vals[backend] = (dt, out)
    (ta, va), (tb, vb) = vals["numba"], vals["numpy"]
    print(f"exact CF   n={n:<4d} {'':11s}"
          f"numba {ta*1e3:8.1f} ms   numpy {tb*1e3:8.1f} ms   "
          f"speedup {tb/ta:4.1f}x   agree={abs(va-vb) < 1e-10}")


def bench_exhaustive(n, reps):
    cfg = OfdmConfig(n, QAM16, 4)
    rng = np.random.default_rng(3)
    w = sample_block(QAM16, n, rng) * cfg.cf_scale
    vals = {}
    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        dt, out = timeit(lambda: kernels.exhaustive_best(w, cfg.grid_size), reps)
        vals[backend] = (dt, out[1])
    (ta, va), (tb, vb) = vals["numba"], vals["numpy"]
    print(f"exhaustive n={n:<4d} {'':11s}"
          f"numba {ta*1e3:8.1f} ms   numpy {tb*1e3:8.1f} ms   "
          f"speedup {tb/ta:4.1f}x   agree={abs(va-vb) < 1e-10}")


def main():
    print("compiling numba kernels (first run only) ...")
    kernels.set_backend("numba")
    kernels.warmup()
    print()
    bench_selection(64, 100, reps=10)
    bench_selection(64, 5, reps=50)
    bench_selection(256, 100, reps=3)
    bench_exact(14, reps=5)
    bench_exhaustive(14, reps=5)
    kernels.set_backend(None)


if __name__ == "__main__":
    main()
