"""Benchmark the l1 solver kernels: compiled extension vs NumPy fallback.

Run from the repository root after an editable install:

    python benchmarks/bench_solver.py

Times per-column basis-pursuit solves on planted sparse instances at a few
problem sizes, for both kernel implementations, then sweeps the worker
count of the column-parallel reconstruction with the active backend.
"""

import time

import numpy as np

import parcs
from parcs.core import Signal2D
from parcs.recon import SolverOptions, _projector, reconstruct_parallel
from parcs.sensing import gaussian_sensing, sample_parallel
from parcs._kernels import _admm_py

try:
    from parcs._kernels import _admm_c
except ImportError:
    _admm_c = None

SIZES = [(64, 19, 32), (144, 46, 64), (256, 80, 64)]  # (m, k, columns)
TOLS = (1e-9, 1e-9)
MAX_ITER = 20_000


def _planted(m, k, n, seed):
    a = gaussian_sensing(k, m, seed=seed)
    rng = np.random.default_rng(seed)
    x = np.zeros((m, n))
    s = max(2, m // 32)
    for j in range(n):
        x[rng.choice(m, size=s, replace=False), j] = rng.normal(size=s) * 3.0
    return a, x


def bench_kernels():
    print(f"active backend: {parcs.BACKEND}")
    print(f"{'size':>16} {'kernel':>8} {'ms/column':>10} {'speedup':>8}")
    for m, k, n in SIZES:
        a, x = _planted(m, k, n, seed=1000 + m)
        y_all = a.entries @ x
        proj = _projector(a)
        times = {}
        for name, module in (("numpy", _admm_py), ("c", _admm_c)):
            if module is None:
                continue
            start = time.perf_counter()
            for j in range(n):
                y = np.ascontiguousarray(y_all[:, j])
                q = proj @ y
                rho = 1.0 / max(float(np.linalg.norm(y)), 1e-300)
                module.admm_bp_kernel(a.entries, proj, q, rho, MAX_ITER, *TOLS, True)
            times[name] = (time.perf_counter() - start) / n
        for name, per_col in times.items():
            speedup = times["numpy"] / per_col
            print(f"{m:>5}x{k:<4}n={n:<4} {name:>8} {per_col * 1e3:>10.2f} {speedup:>8.2f}x")


def bench_workers():
    m, k, n = 256, 80, 64
    a, x = _planted(m, k, n, seed=7)
    batch = sample_parallel(a, Signal2D(x))
    opts = SolverOptions(max_iterations=MAX_ITER, abs_tol=TOLS[0], rel_tol=TOLS[1])
    reconstruct_parallel(a, batch, opts, workers=2)  # warm-up
    print(f"\ncolumn-parallel reconstruction, backend={parcs.BACKEND}, "
          f"{n} columns of m={m}, k={k}")
    base = None
    for workers in (1, 2, 4, 8):
        best = min(
            _timed(lambda: reconstruct_parallel(a, batch, opts, workers=workers))
            for _ in range(3)
        )
        base = base or best
        print(f"  workers={workers}: {best:.3f}s (x{base / best:.2f})")


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


if __name__ == "__main__":
    bench_kernels()
    bench_workers()
