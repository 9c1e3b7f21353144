"""Pure numpy backend for the hot kernels.

Mirrors the compiled `_speedups` module: both consume the same kernel spec
tuples produced by `Oracle.kernel_spec()`:

    (code, n, ia, ib, fa, extra)

    code 1  modular      fa = element weights (n,)
    code 2  coverage     ia = per-element covered-item bitmasks (uint64, n),
                         fa = item weights (U,), extra = universe size U
    code 3  cut          ia = edge tails, ib = edge heads, fa = edge weights,
                         extra = 1 if directed else 0
    code 4  hard         extra = k; ids 0..k-2 are the u's, id n-1 is w

All masks are uint64 subset bitmasks over ground set {0, ..., n-1}, n <= 64.
"""

import numpy as np

BACKEND = "pure"

_CHUNK = 16384


def _eval_chunk(spec, masks):
    code, n, ia, ib, fa, extra = spec
    if code == 1:  # modular
        bits = (masks[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)
        return bits.astype(np.float64) @ fa
    if code == 2:  # coverage
        u_size = extra
        bits = ((masks[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(bool)
        item_bits = ((ia[:, None] >> np.arange(u_size, dtype=np.uint64)) & np.uint64(1)).astype(bool)
        covered = bits @ item_bits  # counts; >0 means covered
        return (covered > 0).astype(np.float64) @ fa
    if code == 3:  # cut
        in_u = ((masks[:, None] >> ia.astype(np.uint64)) & np.uint64(1)).astype(bool)
        in_v = ((masks[:, None] >> ib.astype(np.uint64)) & np.uint64(1)).astype(bool)
        crossing = (in_u & ~in_v) if extra else (in_u ^ in_v)
        return crossing.astype(np.float64) @ fa
    if code == 4:  # hard instance
        k = extra
        bits = (masks[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)
        size = bits.sum(axis=1).astype(np.float64)
        u_count = bits[:, : k - 1].sum(axis=1).astype(np.float64)
        has_w = bits[:, n - 1].astype(bool)
        return np.where(has_w, float(k) + u_count, size)
    raise ValueError(f"unknown kernel spec code {code}")


def eval_many(spec, masks):
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    if masks.size <= _CHUNK:
        return _eval_chunk(spec, masks)
    out = np.empty(masks.size, dtype=np.float64)
    for lo in range(0, masks.size, _CHUNK):
        hi = min(lo + _CHUNK, masks.size)
        out[lo:hi] = _eval_chunk(spec, masks[lo:hi])
    return out


def _combination_masks(ids, size):
    """uint64 masks of all `size`-subsets of `ids`, in lexicographic order."""
    from itertools import combinations

    single = np.array([np.uint64(1) << np.uint64(e) for e in ids], dtype=np.uint64)
    if size == 0:
        return np.zeros(1, dtype=np.uint64), [()]
    combos = list(combinations(range(len(ids)), size))
    masks = np.zeros(len(combos), dtype=np.uint64)
    for row, combo in enumerate(combos):
        m = np.uint64(0)
        for j in combo:
            m |= single[j]
        masks[row] = m
    id_tuples = [tuple(int(ids[j]) for j in combo) for combo in combos]
    return masks, id_tuples


def brute_force(spec, ids, k):
    """Best subset of `ids` with size <= k; ties to the lexicographically
    smallest sorted id list. Returns (best_ids, best_value, n_evals)."""
    ids = sorted(int(e) for e in ids)
    best_ids = ()
    best_val = -np.inf
    n_evals = 0
    for size in range(0, min(k, len(ids)) + 1):
        masks, id_tuples = _combination_masks(ids, size)
        vals = eval_many(spec, masks)
        n_evals += len(masks)
        top = float(np.max(vals))
        if top > best_val:
            idx = int(np.argmax(vals))
            best_val = top
            best_ids = id_tuples[idx]
        elif top == best_val:
            for idx in np.flatnonzero(vals == top):
                cand = id_tuples[int(idx)]
                if list(cand) < list(best_ids):
                    best_ids = cand
    return np.array(best_ids, dtype=np.int64), best_val, n_evals


def multilinear_exact(spec, frac_ids, frac_probs, base_mask):
    """Expectation of f over independent inclusion of `frac_ids` with the given
    probabilities, with `base_mask` elements always present."""
    s = len(frac_ids)
    total = 1 << s
    weights = np.ones(total, dtype=np.float64)
    masks = np.full(total, np.uint64(base_mask), dtype=np.uint64)
    sub = np.arange(total, dtype=np.uint64)
    for j in range(s):
        inset = ((sub >> np.uint64(j)) & np.uint64(1)).astype(bool)
        weights *= np.where(inset, frac_probs[j], 1.0 - frac_probs[j])
        masks[inset] |= np.uint64(1) << np.uint64(int(frac_ids[j]))
    vals = eval_many(spec, masks)
    return float(weights @ vals), total
