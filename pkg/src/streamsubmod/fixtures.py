"""Seeded instance generators shared by the verify suites and the test suite."""

import numpy as np

from ._util import rng_from
from .extensions import FractionalPoint
from .oracles import (CoverageOracle, CutOracle, FunctionOracle,
                      HardInstanceOracle, ModularOracle)


def random_cut(seed: int, n: int = None, edge_prob: float = 0.4,
               unit_weights: bool = False) -> CutOracle:
    """Erdos-Renyi undirected cut instance; non-monotone objective."""
    rng = rng_from(seed)
    if n is None:
        n = int(rng.integers(8, 15))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                w = 1.0 if unit_weights else float(rng.uniform(0.5, 1.5))
                edges.append((u, v, w))
    if not edges:  # keep the instance non-trivial
        edges.append((0, n - 1, 1.0))
    return CutOracle(edges, n=n)


def random_coverage(seed: int, n: int = 8, universe: int = 12,
                    unit_weights: bool = False) -> CoverageOracle:
    """Random weighted coverage instance; monotone objective."""
    rng = rng_from(seed)
    sets = []
    for _ in range(n):
        size = int(rng.integers(1, max(2, universe // 2)))
        sets.append(rng.choice(universe, size=size, replace=False).tolist())
    weights = None
    if not unit_weights:
        weights = {i: float(rng.uniform(0.5, 2.0)) for i in range(universe)}
    return CoverageOracle(sets, weights)


def random_modular(seed: int, n: int = 8) -> ModularOracle:
    rng = rng_from(seed)
    return ModularOracle(rng.uniform(0.0, 3.0, size=n))


def supermodular_square(n: int = 6) -> FunctionOracle:
    """|S|^2 fault-injection fixture: violates diminishing returns."""
    return FunctionOracle(n, lambda S: float(len(S) ** 2))


def offset_coverage(seed: int, n: int = 8, base: float = 2.0) -> FunctionOracle:
    """Coverage plus a constant, so f(empty) > 0 (still submodular)."""
    inner = random_coverage(seed, n=n)
    return FunctionOracle(n, lambda S: base + inner._value(tuple(sorted(S))))


def mixed_oracle(seed: int, n_max: int = 10):
    """One oracle from a rotating family mix, for broad property sweeps."""
    rng = rng_from(seed)
    n = int(rng.integers(4, n_max + 1))
    kind = seed % 4
    if kind == 0:
        return random_cut(seed + 1000, n=n)
    if kind == 1:
        return random_coverage(seed + 2000, n=n)
    if kind == 2:
        return random_modular(seed + 3000, n=n)
    return HardInstanceOracle(max(2, n // 2), n - max(2, n // 2))


def random_point(seed: int, n: int, max_mass: float = None) -> FractionalPoint:
    """Random sparse fractional point, optionally mass-capped."""
    rng = rng_from(seed)
    support = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
    coords = {int(e): float(rng.uniform(0.05, 0.95)) for e in support}
    point = FractionalPoint(n, coords)
    if max_mass is not None and point.mass() > max_mass:
        scale = max_mass / point.mass()
        point = FractionalPoint(n, {e: v * scale for e, v in coords.items()})
    return point


def acceptance_instances(count: int = 50, seed: int = 20240, n_max: int = 14):
    """The criterion-1 battery: seeded random cut instances with k in {2,3,4}."""
    out = []
    for idx in range(count):
        oracle = random_cut(seed + idx, n=8 + (idx % (n_max - 7)))
        k = 2 + idx % 3
        out.append((oracle, k))
    return out
