"""Compiled and pure kernel backends must agree on every spec family."""

import numpy as np
import pytest

from streamsubmod import _pure, fixtures, kernels
from streamsubmod._util import ids_from_mask, rng_from
from streamsubmod.oracles import make_hard_instance

compiled = pytest.importorskip("streamsubmod._speedups")


def _spec_oracles():
    return [
        fixtures.random_modular(1, n=10),
        fixtures.random_coverage(2, n=10),
        fixtures.random_cut(3, n=10),
        make_hard_instance(4, 6),
    ]


def test_eval_many_agreement():
    rng = rng_from(5)
    for oracle in _spec_oracles():
        spec = oracle.kernel_spec()
        assert spec is not None
        masks = rng.integers(0, 1 << oracle.n, size=300, dtype=np.uint64)
        a = compiled.eval_many(spec, masks)
        b = _pure.eval_many(spec, masks)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
        # and both match the plain python oracle
        for mask, val in zip(masks[:40], a[:40]):
            assert val == pytest.approx(oracle.evaluate(ids_from_mask(int(mask))), abs=1e-12)


def test_brute_force_agreement():
    for oracle in (fixtures.random_cut(7, n=11, unit_weights=True),
                   fixtures.random_coverage(8, n=11, unit_weights=True),
                   make_hard_instance(3, 8)):
        spec = oracle.kernel_spec()
        ids = np.arange(oracle.n, dtype=np.int64)
        for k in (1, 2, 3):
            set_a, val_a, evals_a = compiled.brute_force(spec, ids, k)
            set_b, val_b, evals_b = _pure.brute_force(spec, ids, k)
            assert list(set_a) == list(set_b)
            assert val_a == pytest.approx(val_b, abs=1e-12)
            assert evals_a == evals_b


def test_brute_force_subset_universe():
    oracle = fixtures.random_cut(9, n=12, unit_weights=True)
    spec = oracle.kernel_spec()
    ids = np.array([1, 3, 4, 8, 11], dtype=np.int64)
    set_a, val_a, _ = compiled.brute_force(spec, ids, 2)
    set_b, val_b, _ = _pure.brute_force(spec, ids, 2)
    assert list(set_a) == list(set_b)
    assert set(int(e) for e in set_a) <= set(ids.tolist())
    assert val_a == pytest.approx(val_b)


def test_multilinear_exact_agreement():
    rng = rng_from(11)
    for oracle in _spec_oracles():
        spec = oracle.kernel_spec()
        support = rng.choice(oracle.n, size=6, replace=False).astype(np.int64)
        probs = rng.uniform(0.05, 0.95, size=6)
        base = int(1) << int(rng.integers(oracle.n))
        if base & sum(1 << int(e) for e in support):
            base = 0
        va, ca = compiled.multilinear_exact(spec, np.sort(support), probs, base)
        vb, cb = _pure.multilinear_exact(spec, np.sort(support), probs, base)
        assert va == pytest.approx(vb, abs=1e-9)
        assert ca == cb == 64


def test_backend_selected():
    assert kernels.backend_name() in ("compiled", "pure")
    assert kernels.HAVE_COMPILED == (kernels.backend_name() == "compiled")
