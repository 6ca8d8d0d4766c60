#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs each kernel on G(n,m) graphs of configurable size and prints a table of
wall times plus the speedup factor. Results are verified to match across
backends before timing.

Usage:
    python benchmarks/bench_kernels.py [--n 20000] [--k 10] [--repeat 3]
"""

import argparse
import time

import numpy as np

from netscale import _kernels_py as pure
from netscale import nullmodels as nm

try:
    from netscale import _kernels as compiled
except ImportError:
    compiled = None


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--pairs", type=int, default=2000, help="sampled distance pairs")
    parser.add_argument("--swaps", type=int, default=200000, help="swap attempts")
    args = parser.parse_args()

    if compiled is None:
        print("compiled kernels not built; run `pip install -e .` first")
        return 1

    n, m = args.n, args.n * args.k // 2
    g = nm.gen_gnm(n, m, seed=1)
    rng = np.random.default_rng(0)
    src = rng.integers(0, n, args.pairs)
    dst = rng.integers(0, n, args.pairs)
    u0, v0 = g.edge_arrays()
    pick1 = rng.integers(0, m, args.swaps)
    pick2 = rng.integers(0, m, args.swaps)
    orient = rng.integers(0, 2, args.swaps, dtype=np.int8)

    def swap_case(impl):
        def run():
            u, v = u0.copy(), v0.copy()
            impl.double_edge_swap_chunk(u, v, n, pick1, pick2, orient)
            return (u.sum(), v.sum())

        return run

    cases = [
        ("connected_components", lambda impl: lambda: tuple(sorted(np.bincount(
            impl.connected_components(g.indptr, g.indices)).tolist()))),
        ("geodesic_sum", lambda impl: lambda: impl.geodesic_sum(g.indptr, g.indices)),
        ("triangle_count", lambda impl: lambda: impl.triangle_count(g.indptr, g.indices)),
        ("pair_distances", lambda impl: lambda: impl.pair_distances(
            g.indptr, g.indices, src, dst).sum()),
        ("double_edge_swap", swap_case),
    ]

    print(f"graph: n={n} m={m} (mean degree {2 * m / n:.1f}); best of {args.repeat}")
    print(f"{'kernel':<22} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, make in cases:
        t_c, r_c = timeit(make(compiled), args.repeat)
        t_p, r_p = timeit(make(pure), args.repeat)
        assert r_c == r_p, f"{name}: backend results differ ({r_c} vs {r_p})"
        print(f"{name:<22} {t_c:>10.4f}s {t_p:>10.4f}s {t_p / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
