"""Oracle families: values, errors, call accounting, submodularity checks."""

import threading
from itertools import combinations

import numpy as np
import pytest

from streamsubmod import fixtures
from streamsubmod.errors import InputError
from streamsubmod._util import ids_from_mask, rng_from
from streamsubmod.oracles import (CoverageOracle, CutOracle, FunctionOracle,
                                  HardInstanceOracle, ModularOracle,
                                  eval_masks, load_coverage, load_edge_list,
                                  make_coverage, make_cut, make_hard_instance,
                                  verify_submodular)


def test_coverage_union_count():
    # three sets covering 3 distinct universe items in total
    oracle = make_coverage([[0, 1], [1, 2], [5]], None)
    assert oracle.evaluate([0, 1]) == pytest.approx(3.0)


def test_empty_set_non_negative():
    for seed in range(6):
        oracle = fixtures.mixed_oracle(seed)
        assert oracle.evaluate(()) >= 0.0


def test_hard_instance_paper_values():
    oracle = make_hard_instance(3, 2)
    # u ids 0,1; v ids 2,3; w id 4
    assert oracle.evaluate([0, 1, 4]) == pytest.approx(5.0)  # 2k-1
    assert oracle.evaluate([2, 3]) == pytest.approx(2.0)
    assert oracle.evaluate([4]) == pytest.approx(3.0)
    assert make_hard_instance(4, 2).evaluate([0, 5]) == pytest.approx(5.0)  # k + 1


def test_evaluate_errors():
    oracle = make_coverage([[0], [1]], None)
    with pytest.raises(InputError):
        oracle.evaluate([0, 5])
    with pytest.raises(InputError):
        oracle.evaluate([1, 1])
    with pytest.raises(InputError):
        make_hard_instance(0, 3)
    with pytest.raises(InputError):
        make_coverage([[0]], {0: -1.0})
    with pytest.raises(InputError):
        make_cut([(0, 1, -0.5)])


def test_marginal():
    oracle = ModularOracle([2.5, 1.0, 0.5])
    assert oracle.marginal(0, [1]) == pytest.approx(2.5)
    assert oracle.marginal(0, [0, 1]) == 0.0
    hard = make_hard_instance(3, 2)
    assert hard.marginal(4, [2]) == pytest.approx(2.0)  # f({v1,w}) - f({v1}) = 3 - 1


def test_marginal_call_accounting():
    oracle = ModularOracle([1.0, 2.0])
    before = oracle.calls
    oracle.marginal(0, [1])
    assert oracle.calls == before + 2
    oracle.marginal(1, [1])  # member: no calls
    assert oracle.calls == before + 2


def test_cut_values():
    tri = make_cut([(0, 1), (1, 2), (0, 2)])
    assert tri.evaluate(()) == 0.0
    assert tri.evaluate([0, 1, 2]) == 0.0
    assert tri.evaluate([0]) == pytest.approx(2.0)
    directed = make_cut([(0, 1, 2.0)], directed=True)
    assert directed.evaluate([0]) == pytest.approx(2.0)
    assert directed.evaluate([1]) == 0.0
    looped = make_cut([(0, 0, 3.0), (0, 1, 1.0)])
    assert looped.evaluate([0]) == pytest.approx(1.0)  # self-loop ignored


def test_coverage_disjoint_additive():
    oracle = make_coverage([[0, 1], [2], [3, 4, 5]], None)
    total = oracle.evaluate([0]) + oracle.evaluate([1]) + oracle.evaluate([2])
    assert oracle.evaluate([0, 1, 2]) == pytest.approx(total)
    assert make_coverage([], None).evaluate(()) == 0.0


def test_verify_submodular():
    assert verify_submodular(fixtures.random_coverage(5, n=6))
    assert verify_submodular(make_hard_instance(3, 2))
    assert not verify_submodular(fixtures.supermodular_square(5))
    with pytest.raises(InputError):
        verify_submodular(FunctionOracle(13, lambda S: 0.0), mode="exhaustive")
    # sampled mode agrees on a larger instance
    assert verify_submodular(fixtures.random_cut(3, n=16), mode="sampled", samples=300)


def test_diminishing_returns_enumeration():
    # independent check: all pairs A subset B subset N - {e}
    for seed in (0, 1, 2):
        oracle = fixtures.mixed_oracle(seed, n_max=6)
        n = oracle.n
        table = {mask: oracle.evaluate(ids_from_mask(mask)) for mask in range(1 << n)}
        for e in range(n):
            ebit = 1 << e
            for b_mask in range(1 << n):
                if b_mask & ebit:
                    continue
                sub = b_mask
                while True:
                    marg_a = table[sub | ebit] - table[sub]
                    marg_b = table[b_mask | ebit] - table[b_mask]
                    assert marg_a >= marg_b - 1e-9
                    if sub == 0:
                        break
                    sub = (sub - 1) & b_mask


def test_non_negativity_random_sets():
    rng = rng_from(99)
    for seed in range(4):
        oracle = fixtures.mixed_oracle(seed)
        for _ in range(1000):
            mask = int(rng.integers(0, 1 << oracle.n))
            assert oracle.evaluate(ids_from_mask(mask)) >= 0.0


def test_concurrent_call_counter():
    oracle = ModularOracle(np.ones(8))
    per_thread = 500

    def work():
        for _ in range(per_thread):
            oracle.evaluate([0, 3])

    threads = [threading.Thread(target=work) for _ in range(8)]
    before = oracle.calls
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert oracle.calls == before + 8 * per_thread


def test_sampled_value_lower_bound_probe():
    # mean f(A(p)) >= (1-p) f(empty) for inclusion probabilities <= p;
    # the offset oracle makes the bound non-trivial (f(empty) > 0)
    oracle = fixtures.offset_coverage(7, n=8, base=3.0)
    p = 0.4
    rng = rng_from(41)
    probs = rng.uniform(0.0, p, size=oracle.n)
    draws = []
    for _ in range(10_000):
        u = rng.random(oracle.n)
        draws.append(oracle.evaluate([e for e in range(oracle.n) if u[e] < probs[e]]))
    draws = np.array(draws)
    stderr = draws.std(ddof=1) / np.sqrt(draws.size)
    assert draws.mean() >= (1 - p) * oracle.evaluate(()) - 3 * stderr


def test_eval_masks_matches_evaluate():
    for seed in range(6):
        oracle = fixtures.mixed_oracle(seed)
        rng = rng_from(seed + 70)
        masks = rng.integers(0, 1 << oracle.n, size=50, dtype=np.uint64)
        batch = eval_masks(oracle, masks)
        for mask, value in zip(masks, batch):
            assert value == pytest.approx(oracle.evaluate(ids_from_mask(int(mask))), abs=1e-12)


def test_load_edge_list(tmp_path):
    path = tmp_path / "graph.edges"
    path.write_text("# a comment\n0 1 2.0\n1 2\n\n2 0 0.5  # trailing\n")
    oracle = load_edge_list(path)
    assert isinstance(oracle, CutOracle)
    assert oracle.n == 3
    assert oracle.evaluate([0]) == pytest.approx(2.5)


def test_load_edge_list_malformed(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("0 1 2.0 7\n")
    with pytest.raises(InputError):
        load_edge_list(path)


def test_load_coverage(tmp_path):
    path = tmp_path / "family.cov"
    path.write_text("0: a b\n1: b c\nweight c 2.0\n# comment\n2: d\n")
    oracle = load_coverage(path)
    assert isinstance(oracle, CoverageOracle)
    assert oracle.n == 3
    assert oracle.evaluate([0, 1]) == pytest.approx(1 + 1 + 2.0)
    assert oracle.evaluate([2]) == pytest.approx(1.0)


def test_hard_instance_layout():
    oracle = make_hard_instance(4, 3)
    assert oracle.n == 7
    assert oracle.u_ids == (0, 1, 2)
    assert oracle.v_ids == (3, 4, 5)
    assert oracle.w_id == 6
    assert oracle.opt_value() == 7.0
    # brute-force optimum is exactly {u_1..u_{k-1}, w}
    from streamsubmod.offline import brute_force
    assert brute_force(oracle, range(oracle.n), 4).set == (0, 1, 2, 6)
