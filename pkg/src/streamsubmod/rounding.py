"""Dependent rounding of a fractional point in the cardinality polytope.

Both procedures repeatedly merge the two lowest-id strictly-fractional
coordinates (a, b) with the mass-conserving pairwise move:

    a + b <= 1:  (a+b, 0)  or  (0, a+b)
    a + b  > 1:  (1, a+b-1) or (a+b-1, 1)

swap_round picks the branch randomly with the marginal-preserving
probabilities; pipage_round_deterministic picks the branch with the larger
exact multilinear value, so f(S) >= F(x) holds deterministically.
"""

import numpy as np

from ._util import rng_from
from .errors import InputError, InvariantViolation
from .extensions import EXACT_CAP, FractionalPoint, multilinear_exact
from .oracles import Oracle

_FRAC_TOL = 1e-12
_MASS_TOL = 1e-9


def _snap(v: float) -> float:
    if v <= _FRAC_TOL:
        return 0.0
    if v >= 1.0 - _FRAC_TOL:
        return 1.0
    return v


def _working_coords(x: FractionalPoint, k: int):
    if x.mass() > k + _MASS_TOL:
        raise InputError(f"fractional mass {x.mass():.12g} exceeds capacity k={k}")
    return {e: _snap(v) for e, v in x.coords.items() if _snap(v) > 0.0}


def _fractional_ids(coords) -> list:
    return sorted(e for e, v in coords.items() if 0.0 < v < 1.0)


def _pair_moves(a: float, b: float):
    """The two candidate outcomes of one pairwise move, with branch-1's
    marginal-preserving probability."""
    s = a + b
    if s <= 1.0:
        return (s, 0.0), (0.0, s), a / s
    return (1.0, s - 1.0), (s - 1.0, 1.0), (1.0 - b) / (2.0 - s)


def swap_round(oracle: Oracle, x: FractionalPoint, k: int, seed: int) -> tuple:
    """Randomized rounding: |S| <= k always and Pr[e in S] = x_e over seeds."""
    coords = _working_coords(x, k)
    rng = rng_from(seed)
    while True:
        frac = _fractional_ids(coords)
        if len(frac) < 2:
            break
        e1, e2 = frac[0], frac[1]
        (a1, b1), (a2, b2), p1 = _pair_moves(coords[e1], coords[e2])
        na, nb = (a1, b1) if rng.random() < p1 else (a2, b2)
        coords[e1] = _snap(na)
        coords[e2] = _snap(nb)
    chosen = sorted(e for e, v in coords.items() if v == 1.0)
    frac = _fractional_ids(coords)
    if frac:
        lone = frac[0]
        # feasibility guard: x may carry up to 1e-9 excess mass
        if rng.random() < coords[lone] and len(chosen) < k:
            chosen = sorted(chosen + [lone])
    return tuple(chosen)


def pipage_round_deterministic(oracle: Oracle, x: FractionalPoint, k: int) -> tuple:
    """Deterministic rounding using exact F: returns S with f(S) >= F(x)."""
    if oracle.n > EXACT_CAP:
        raise InputError(
            f"deterministic pipage needs exact F, capped at n={EXACT_CAP} (got n={oracle.n})")
    coords = _working_coords(x, k)
    point = FractionalPoint(oracle.n, coords)
    current = multilinear_exact(oracle, point)
    while True:
        frac = _fractional_ids(point.coords)
        if not frac:
            break
        if len(frac) == 1:
            lone = frac[0]
            ones = sum(1 for v in point.coords.values() if v == 1.0)
            cand_out = point.with_coord(lone, 0.0)
            v_out = multilinear_exact(oracle, cand_out)
            if ones >= k:  # only reachable through the 1e-9 mass tolerance
                point, new_val = cand_out, v_out
            else:
                cand_in = point.with_coord(lone, 1.0)
                v_in = multilinear_exact(oracle, cand_in)
                point, new_val = (cand_in, v_in) if v_in > v_out else (cand_out, v_out)
        else:
            e1, e2 = frac[0], frac[1]
            (a1, b1), (a2, b2), _ = _pair_moves(point[e1], point[e2])
            cand1 = point.with_coord(e1, _snap(a1)).with_coord(e2, _snap(b1))
            cand2 = point.with_coord(e1, _snap(a2)).with_coord(e2, _snap(b2))
            v1 = multilinear_exact(oracle, cand1)
            v2 = multilinear_exact(oracle, cand2)
            point, new_val = (cand1, v1) if v1 >= v2 else (cand2, v2)
        if new_val < current - 1e-9 * max(1.0, abs(current)):
            raise InvariantViolation(
                f"pipage move decreased F: {current:.12g} -> {new_val:.12g}")
        current = new_val
    chosen = tuple(sorted(e for e, v in point.coords.items() if v == 1.0))
    if len(chosen) > k:
        raise InvariantViolation(f"pipage produced {len(chosen)} > k={k} elements")
    return chosen
