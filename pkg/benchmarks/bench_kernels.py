#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure numpy fallback.

Usage:  python3 benchmarks/bench_kernels.py [--repeats N]

Times the three hot kernels (batch evaluation, brute-force subset search,
exact multilinear enumeration) on representative desk-scale workloads and
prints one row per (kernel, family) with the speedup factor.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from streamsubmod import _pure  # noqa: E402
from streamsubmod import fixtures  # noqa: E402
from streamsubmod._util import rng_from  # noqa: E402
from streamsubmod.oracles import make_hard_instance  # noqa: E402

try:
    from streamsubmod import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    rng = rng_from(42)
    oracles = {
        "modular": fixtures.random_modular(1, n=20),
        "coverage": fixtures.random_coverage(2, n=20, universe=40),
        "cut": fixtures.random_cut(3, n=20),
        "hard": make_hard_instance(6, 14),
    }
    masks = rng.integers(0, 1 << 20, size=200_000, dtype=np.uint64)
    support = np.arange(16, dtype=np.int64)
    probs = rng.uniform(0.1, 0.9, size=16)
    for family, oracle in oracles.items():
        spec = oracle.kernel_spec()
        yield f"eval_many[{family}] 2e5 masks", lambda b, s=spec: b.eval_many(s, masks)
        yield (f"brute_force[{family}] n=20 k=4",
               lambda b, s=spec: b.brute_force(s, np.arange(20, dtype=np.int64), 4))
        yield (f"multilinear[{family}] supp=16",
               lambda b, s=spec: b.multilinear_exact(s, support, probs, 0))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    if _speedups is None:
        print("compiled backend not available; timing the pure backend only")
    header = f"{'workload':<38}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in workloads():
        t_pure = _time(lambda: call(_pure), args.repeats)
        if _speedups is None:
            print(f"{name:<38}{t_pure:>12.4f}{'-':>14}{'-':>9}")
            continue
        t_fast = _time(lambda: call(_speedups), args.repeats)
        print(f"{name:<38}{t_pure:>12.4f}{t_fast:>14.4f}{t_pure / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
