"""Offline post-processing algorithms, each declaring its approximation factor.

The streaming modules treat these as black boxes: a callable
(oracle, ground_elements, k) -> OfflineResult. The declared alpha feeds the
streaming threshold constant c = alpha / (1 + alpha).
"""

import math
from dataclasses import dataclass
from functools import partial
from itertools import combinations

import numpy as np

from . import kernels
from ._util import mask_from_ids, rng_from
from .errors import InputError
from .oracles import Oracle, eval_masks

BRUTE_FORCE_CAP = 2_000_000


@dataclass
class OfflineResult:
    set: tuple           # sorted element ids, |set| <= k
    alpha: float         # declared approximation factor in (0, 1]


def _subset_count(m: int, k: int) -> int:
    return sum(math.comb(m, i) for i in range(min(k, m) + 1))


def brute_force(oracle: Oracle, U, k: int, cap: int = BRUTE_FORCE_CAP) -> OfflineResult:
    """Exact optimum over subsets of U of size <= k (alpha = 1).

    Ties break to the lexicographically smallest sorted id list.
    """
    ids = sorted(set(int(e) for e in U))
    count = _subset_count(len(ids), k)
    if count > cap:
        raise InputError(
            f"brute force would evaluate {count} subsets, exceeding the cap of {cap}")
    spec = oracle.kernel_spec()
    if spec is not None:
        best_ids, _, n_evals = kernels.brute_force(
            spec, np.array(ids, dtype=np.int64), k)
        oracle.add_calls(n_evals)
        return OfflineResult(tuple(int(e) for e in best_ids), 1.0)
    best_ids = ()
    best_val = -math.inf
    for size in range(min(k, len(ids)) + 1):
        for combo in combinations(ids, size):
            val = oracle.evaluate(combo)
            if val > best_val or (val == best_val and list(combo) < list(best_ids)):
                best_val = val
                best_ids = combo
    return OfflineResult(tuple(best_ids), 1.0)


def random_greedy(oracle: Oracle, U, k: int, seed: int = 0) -> OfflineResult:
    """Random greedy of Buchbinder et al. (alpha = 1/e for non-monotone f).

    Each of the k rounds ranks the remaining elements by marginal gain, keeps
    the top-k with strictly positive gain, pads with dummies up to k, and adds
    one uniform choice (a dummy adds nothing).
    """
    if k < 1:
        raise InputError("random_greedy requires k >= 1")
    ids = sorted(set(int(e) for e in U))
    rng = rng_from(seed)
    chosen = []
    for _ in range(k):
        remaining = [e for e in ids if e not in chosen]
        if not remaining:
            break
        gains = [(oracle.marginal(e, chosen), e) for e in remaining]
        gains.sort(key=lambda t: (-t[0], t[1]))
        candidates = [(g, e) for g, e in gains if g > 0][:k]
        pick = int(rng.integers(k))
        if pick < len(candidates):
            chosen.append(candidates[pick][1])
    return OfflineResult(tuple(sorted(chosen)), 1.0 / math.e)


def plain_greedy(oracle: Oracle, U, k: int) -> OfflineResult:
    """Classic greedy; the declared 1 - 1/e factor only holds for monotone f."""
    ids = sorted(set(int(e) for e in U))
    chosen = []
    while len(chosen) < k:
        best_gain, best_e = 0.0, None
        for e in ids:
            if e in chosen:
                continue
            g = oracle.marginal(e, chosen)
            if g > best_gain:
                best_gain, best_e = g, e
        if best_e is None:
            break
        chosen.append(best_e)
    return OfflineResult(tuple(sorted(chosen)), 1.0 - 1.0 / math.e)


OFFLINE_ALGORITHMS = {
    "brute-force": (brute_force, 1.0),
    "random-greedy": (random_greedy, 1.0 / math.e),
    "plain-greedy": (plain_greedy, 1.0 - 1.0 / math.e),
}


def make_offline(name: str, seed: int = 0):
    """(callable, alpha) for a named offline algorithm; seeds the random one."""
    if name not in OFFLINE_ALGORITHMS:
        raise InputError(
            f"unknown offline algorithm {name!r}; choose from {sorted(OFFLINE_ALGORITHMS)}")
    fn, alpha = OFFLINE_ALGORITHMS[name]
    if name == "random-greedy":
        fn = partial(random_greedy, seed=seed)
    return fn, alpha
