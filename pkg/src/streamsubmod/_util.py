"""Small shared helpers: bitmask <-> id-list conversion and seeded RNG."""

import numpy as np


def mask_from_ids(ids) -> int:
    m = 0
    for e in ids:
        m |= 1 << int(e)
    return m


def ids_from_mask(mask: int) -> tuple:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def rng_from(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def keyed_rng(*key) -> np.random.Generator:
    """Stateless generator from an integer tuple key (stable across runs).

    Components may be negative (ladder exponents): SeedSequence entropy must
    be non-negative, so each component is zigzag-encoded first.
    """
    encoded = tuple(2 * int(k) if k >= 0 else -2 * int(k) - 1 for k in key)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(encoded)))


def derived_seed(*key) -> int:
    """Stable non-negative integer seed derived from an integer tuple key."""
    return int(keyed_rng(*key).integers(2 ** 62))
