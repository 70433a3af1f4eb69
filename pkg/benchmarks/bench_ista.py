#!/usr/bin/env python3
"""Benchmark the ISTA inner-loop kernels: compiled extension vs numpy fallback.

Both backends are imported directly (no environment variable needed) and run
on identical inputs, so the reported ratio isolates the kernel itself. The
final solutions are compared to confirm the backends agree.

Usage: python3 benchmarks/bench_ista.py [--m 400] [--n 128] [--iters 500]
       [--repeats 20]
"""

import argparse
import time

import numpy as np

from atlas_sensing import _ista_py

try:
    from atlas_sensing import _ista_cy
except ImportError:
    _ista_cy = None


def make_problem(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    truth = np.zeros(n)
    support = rng.choice(n, size=max(1, n // 10), replace=False)
    truth[support] = rng.standard_normal(support.size)
    y = A @ truth + 0.01 * rng.standard_normal(m)
    return A, y


def time_kernel(kernel, A, y, beta, t, iters, repeats):
    v0 = np.zeros(A.shape[1])
    best = float("inf")
    out = None
    for _ in range(repeats):
        tic = time.perf_counter()
        out = kernel.ista_loop(A, y, v0, beta, t, 1.0, iters, 0.0)
        best = min(best, time.perf_counter() - tic)
    return best, out[0]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=400)
    parser.add_argument("--n", type=int, default=128)
    parser.add_argument("--iters", type=int, default=500)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    A, y = make_problem(args.m, args.n, args.seed)
    L = np.linalg.norm(A, 2) ** 2
    t = 1.0 / L
    beta = 0.05

    py_time, v_py = time_kernel(_ista_py, A, y, beta, t, args.iters, args.repeats)
    print(f"problem: m={args.m} n={args.n} iters={args.iters} "
          f"(best of {args.repeats})")
    print(f"python fallback : {py_time * 1e3:8.2f} ms")
    if _ista_cy is None:
        print("compiled kernel : not built (install with Cython available)")
        return
    cy_time, v_cy = time_kernel(_ista_cy, A, y, beta, t, args.iters, args.repeats)
    print(f"compiled kernel : {cy_time * 1e3:8.2f} ms")
    print(f"speedup         : {py_time / cy_time:8.2f}x")
    gap = np.max(np.abs(v_py - v_cy))
    print(f"max |v_py - v_cy|: {gap:.3e}")


if __name__ == "__main__":
    main()
