#!/usr/bin/env python3
"""Benchmark: compiled Bessel kernel vs the pure-Python fallback.

Times the scalar entry points and the grid evaluators on a log-spaced
argument set, prints a small table with the speedup, and cross-checks
that both backends agree while at it.

Usage: python benchmarks/bench_bessel.py [n_points]
"""

import sys
import time

import numpy as np

from necrobifurc.backend import available_backends, get_kernel


def time_scalar(kern, fn, pairs, repeats=3):
    f = getattr(kern, fn)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for n, x in pairs:
            f(n, x)
        best = min(best, time.perf_counter() - t0)
    return best


def time_grid(kern, fn, n, xs, repeats=3):
    f = getattr(kern, fn)
    out = np.empty_like(xs)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        f(n, xs, out)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n_points = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    rng = np.random.default_rng(7)
    xs = np.ascontiguousarray(10.0 ** rng.uniform(-3, 2.0, size=n_points))
    orders = rng.integers(0, 17, size=n_points)
    pairs = [(int(n), float(x)) for n, x in zip(orders, xs)]

    backends = available_backends()
    print(f"backends available: {backends}; {n_points} evaluations each")
    kernels = {name: get_kernel(name) for name in backends}

    rows = []
    for fn in ("besseli", "besselk", "besseli_scaled", "besselk_scaled",
               "besseli_ln", "besselk_ln"):
        times = {name: time_scalar(k, fn, pairs)
                 for name, k in kernels.items()}
        rows.append((fn, times))
    for fn in ("besseli_grid", "besselk_grid"):
        times = {name: time_grid(k, fn, 2, xs)
                 for name, k in kernels.items()}
        rows.append((fn, times))

    header = f"{'function':<18}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for fn, times in rows:
        line = f"{fn:<18}"
        for name in backends:
            line += f"{times[name] * 1e3:>10.2f}ms"
        if len(backends) == 2:
            line += f"{times[backends[1]] / times[backends[0]]:>9.1f}x"
        print(line)

    if len(backends) == 2:
        cy, py = kernels[backends[0]], kernels[backends[1]]
        worst = 0.0
        for n, x in pairs[:2000]:
            a, b = cy.besseli(n, x), py.besseli(n, x)
            if a != 0.0 and np.isfinite(a):
                worst = max(worst, abs(a - b) / abs(a))
        print(f"max relative backend disagreement (I_n sample): "
              f"{worst:.2e}")


if __name__ == "__main__":
    main()
