"""Continuous extensions of a set function.

Exact and sampled evaluation of the multilinear extension F, the coupled
partial-derivative form used by the fractional streaming variant, and exact
evaluation of the Lovász extension via the sorted-threshold formula.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._util import ids_from_mask, rng_from
from .errors import InputError
from .oracles import Oracle, eval_masks

EXACT_CAP = 20  # 2^20 evaluations is the desk-scale ceiling
_ONE_TOL = 1e-12


@dataclass
class Estimate:
    """Monte Carlo estimate with its standard error."""
    mean: float
    stderr: float
    samples: int


class FractionalPoint:
    """Sparse x in [0,1]^N; unstored coordinates are 0."""

    def __init__(self, n: int, coords=None):
        self.n = int(n)
        self.coords = {}
        if coords:
            for e, v in dict(coords).items():
                self.set_coord(int(e), float(v))

    def set_coord(self, e: int, v: float):
        if e < 0 or e >= self.n:
            raise InputError(f"coordinate {e} out of range for n={self.n}")
        if v < -1e-12 or v > 1 + 1e-12:
            raise InputError(f"coordinate value {v} outside [0, 1]")
        v = min(max(v, 0.0), 1.0)
        if v == 0.0:
            self.coords.pop(e, None)
        else:
            self.coords[e] = v

    def __getitem__(self, e: int) -> float:
        return self.coords.get(e, 0.0)

    def mass(self) -> float:
        return float(sum(self.coords.values()))

    def support(self) -> tuple:
        return tuple(sorted(self.coords))

    def copy(self) -> "FractionalPoint":
        out = FractionalPoint(self.n)
        out.coords = dict(self.coords)
        return out

    def with_coord(self, e: int, v: float) -> "FractionalPoint":
        out = self.copy()
        out.set_coord(e, v)
        return out

    @classmethod
    def indicator(cls, S, n: int) -> "FractionalPoint":
        return cls(n, {e: 1.0 for e in S})

    def _split(self):
        """(always-in mask, fractional ids, fractional probs)."""
        base = 0
        ids, probs = [], []
        for e in sorted(self.coords):
            v = self.coords[e]
            if v >= 1.0 - _ONE_TOL:
                base |= 1 << e
            else:
                ids.append(e)
                probs.append(v)
        return base, np.array(ids, dtype=np.int64), np.array(probs, dtype=np.float64)


def multilinear_exact(oracle: Oracle, x: FractionalPoint) -> float:
    """F(x) by full enumeration over the fractional support. Capped at n <= 20."""
    if oracle.n > EXACT_CAP:
        raise InputError(
            f"exact multilinear evaluation capped at n={EXACT_CAP} "
            f"(got n={oracle.n}); use multilinear_sample instead")
    base, ids, probs = x._split()
    spec = oracle.kernel_spec()
    if spec is not None:
        value, n_evals = kernels.multilinear_exact(spec, ids, probs, base)
        oracle.add_calls(n_evals)
        return value
    total = 1 << len(ids)
    value = 0.0
    for sub in range(total):
        mask = base
        weight = 1.0
        for j in range(len(ids)):
            if (sub >> j) & 1:
                mask |= 1 << int(ids[j])
                weight *= probs[j]
            else:
                weight *= 1.0 - probs[j]
        value += weight * oracle.evaluate(ids_from_mask(mask))
    return value


def _sample_masks(base, ids, probs, samples, rng):
    """Seeded inclusion draws; identical across kernel backends."""
    if len(ids) == 0:
        return np.full(samples, np.uint64(base), dtype=np.uint64)
    incl = rng.random((samples, len(ids))) < probs
    masks = np.full(samples, np.uint64(base), dtype=np.uint64)
    for j, e in enumerate(ids):
        masks[incl[:, j]] |= np.uint64(1) << np.uint64(int(e))
    return masks


def _estimate(values: np.ndarray) -> Estimate:
    m = int(values.size)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(m)) if m > 1 else 0.0
    return Estimate(mean, stderr, m)


def multilinear_sample(oracle: Oracle, x: FractionalPoint, samples: int, seed: int) -> Estimate:
    """Estimate F(x) from independent seeded draws of the random set."""
    if samples < 1:
        raise InputError("multilinear_sample needs samples >= 1")
    base, ids, probs = x._split()
    masks = _sample_masks(base, ids, probs, samples, rng_from(seed))
    return _estimate(eval_masks(oracle, masks))


def partial_derivative(oracle: Oracle, x: FractionalPoint, e: int, mode: str = "exact",
                       samples: int = None, seed: int = None):
    """dF/dx_e as F(x ∨ 1_e) - F(x ∧ 1_{N-e}).

    Sampled mode couples the two evaluations with common random numbers:
    the same inclusion draws for every coordinate other than e.
    """
    if e < 0 or e >= oracle.n:
        raise InputError(f"element id {e} out of range for ground set of size {oracle.n}")
    if mode == "exact":
        hi = multilinear_exact(oracle, x.with_coord(e, 1.0))
        lo = multilinear_exact(oracle, x.with_coord(e, 0.0))
        return hi - lo
    if mode != "sampled":
        raise InputError(f"unknown derivative mode {mode!r}")
    if not samples or samples < 1:
        raise InputError("sampled derivative needs samples >= 1")
    rest = x.with_coord(e, 0.0)
    base, ids, probs = rest._split()
    masks = _sample_masks(base, ids, probs, samples, rng_from(seed))
    ebit = np.uint64(1) << np.uint64(int(e))
    hi_vals = eval_masks(oracle, masks | ebit)
    lo_vals = eval_masks(oracle, masks & ~ebit)
    return _estimate(hi_vals - lo_vals)


def lovasz(oracle: Oracle, x: FractionalPoint) -> float:
    """Exact Lovász extension: one oracle call per distinct level plus f(empty)."""
    levels = sorted(set(x.coords.values()), reverse=True)
    value = (1.0 - (levels[0] if levels else 0.0)) * oracle.evaluate(())
    for i, theta in enumerate(levels):
        nxt = levels[i + 1] if i + 1 < len(levels) else 0.0
        level_set = tuple(sorted(e for e, v in x.coords.items() if v >= theta))
        value += (theta - nxt) * oracle.evaluate(level_set)
    return value
