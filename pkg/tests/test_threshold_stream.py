"""Threshold streaming: golden traces, lemma bounds, ladder mechanics."""

import math

import pytest

from streamsubmod import fixtures
from streamsubmod.errors import InputError
from streamsubmod.offline import brute_force, make_offline
from streamsubmod.oracles import (FunctionOracle, ModularOracle, make_coverage,
                                  make_hard_instance)
from streamsubmod.threshold_stream import (Config, GuessLadder, SolutionBank,
                                           full_finalize, full_process,
                                           run_full, run_simplified,
                                           simplified_finalize,
                                           simplified_process, storage_budget)


def ring_coverage():
    """Six sets around a 6-item ring; OPT for k=2 is 4 (e.g. sets 0 and 2)."""
    return make_coverage([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [0, 5]], None)


def test_config_defaults():
    cfg = Config(epsilon=0.2)
    assert cfg.p == 20 and cfg.eps_prime == pytest.approx(0.1)
    assert cfg.c == pytest.approx(0.5)
    with pytest.raises(InputError):
        Config(epsilon=0.0)
    with pytest.raises(InputError):
        Config(epsilon=0.2, alpha=2.0)


def test_simplified_golden_trace():
    # hand-executed run: tau = OPT = 4, alpha = 1, p = 2, k = 2, threshold 1.0
    oracle = ring_coverage()
    bank = SolutionBank(tau=4.0, p=2, k=2, c=0.5, f_empty=oracle.evaluate(()))
    for e in range(6):
        simplified_process(bank, e, oracle)
    assert bank.solutions[0].elements == [0, 1]
    assert bank.solutions[1].elements == [2, 3]
    accepted = [(rec["element"], rec["i"]) for rec in bank.audit]
    assert accepted == [(0, 0), (1, 0), (2, 1), (3, 1)]
    result = simplified_finalize(bank, oracle, brute_force)
    assert result == (0, 2)
    assert oracle.evaluate(result) == pytest.approx(4.0)
    assert not bank.violations


def test_simplified_rejects_when_full():
    oracle = ModularOracle([5.0, 5.0, 5.0, 5.0])
    bank = SolutionBank(tau=10.0, p=1, k=2, c=0.5, f_empty=0.0)
    for e in range(4):
        simplified_process(bank, e, oracle)
    assert bank.solutions[0].elements == [0, 1]  # later elements discarded


def test_simplified_first_slot_and_marginal_budget():
    oracle = ModularOracle([3.0, 0.1])
    bank = SolutionBank(tau=4.0, p=3, k=2, c=0.5, f_empty=0.0)
    used = bank.process(0, oracle)  # weight 3 >= c*tau/k = 1
    assert bank.solutions[0].elements == [0]
    assert used <= bank.p
    used = bank.process(1, oracle)  # weight 0.1 rejected everywhere
    assert used <= bank.p
    assert bank.stored_elements() == 1


def test_full_solution_reaches_value_bound():
    # every element clears the threshold, so S_1 fills to k and the output
    # value is at least alpha*tau/(1+alpha) = c*tau
    oracle = ModularOracle([2.0] * 6)
    tau = 6.0
    cfg = Config(epsilon=0.5, alpha=1.0, p=2)
    result, bank, _ = run_simplified(oracle, range(6), 3, tau, cfg, brute_force)
    assert len(bank.solutions[0]) == 3
    assert oracle.evaluate(result) >= cfg.c * tau - 1e-12


def test_simplified_empty_stream():
    oracle = ModularOracle([1.0, 1.0])
    cfg = Config(epsilon=0.5, alpha=1.0, p=2)
    result, _, _ = run_simplified(oracle, (), 2, 1.0, cfg, brute_force)
    assert result == ()


def test_known_tau_guarantee_small_battery():
    eps = 0.2
    cfg = Config(epsilon=eps, alpha=1.0)
    for idx in range(8):
        oracle = fixtures.random_cut(idx + 40, n=10)
        k = 2 + idx % 3
        opt = oracle.evaluate(brute_force(oracle, range(oracle.n), k).set)
        if opt <= 0:
            continue
        tau = (1 - eps / 2) * opt
        result, _, stats = run_simplified(oracle, range(oracle.n), k, tau, cfg, brute_force)
        assert oracle.evaluate(result) >= (0.5 - eps) * opt - 1e-9
        assert stats.violations == 0
        assert stats.max_marginals_per_element <= cfg.p


def test_ladder_zero_function_stays_empty():
    oracle = FunctionOracle(4, lambda S: 0.0)
    cfg = Config(epsilon=0.4, alpha=1.0)
    result, ladder, stats = run_full(oracle, range(4), 2, cfg, brute_force)
    assert result == ()
    assert not ladder.banks
    assert stats.peak_stored == 0


def test_ladder_first_element_shape():
    V = 3.0
    oracle = ModularOracle([V, 0.5])
    cfg = Config(epsilon=0.4, alpha=1.0)  # eps' = 0.2, c = 0.5
    ladder = GuessLadder(oracle, 2, cfg)
    assert not ladder.banks  # f(empty) = 0
    ladder.process(0)
    assert ladder.m == pytest.approx(V)
    lo, hi = ladder.guess_range()
    base = 1.2
    assert base ** lo >= V / base - 1e-12
    assert base ** (lo - 1) < V / base
    assert base ** hi <= V * 2 / 0.5 + 1e-9
    assert base ** (hi + 1) > V * 2 / 0.5
    for h, bank in ladder.banks.items():
        expect_accept = V >= bank.threshold
        assert (len(bank.solutions[0]) == 1) == expect_accept


def test_ladder_matches_parallel_simplified_runs():
    # max singleton arrives first and no solution value exceeds it, so m and
    # the guess set are fixed after element 0: every bank must equal a
    # standalone known-tau run over the same stream
    oracle = ModularOracle([5.0, 1.0, 0.9, 0.8, 0.7])
    cfg = Config(epsilon=0.4, alpha=1.0, p=3)
    _, ladder, _ = run_full(oracle, range(5), 1, cfg, brute_force)
    assert ladder.m == pytest.approx(5.0)
    for h, bank in ladder.banks.items():
        fresh = SolutionBank(bank.tau, cfg.p, 1, cfg.c, oracle.evaluate(()))
        for e in range(5):
            simplified_process(fresh, e, oracle)
        assert [s.elements for s in fresh.solutions] == [s.elements for s in bank.solutions]


def test_late_start_equivalence():
    # growing singleton values force mid-stream guess creation; a full replay
    # through a fresh bank must reproduce every surviving bank exactly
    oracle = ModularOracle([0.5, 1.0, 2.0, 4.0, 8.0, 7.0])
    cfg = Config(epsilon=0.4, alpha=1.0, p=2)
    _, ladder, _ = run_full(oracle, range(6), 2, cfg, brute_force)
    assert any(getattr(b, "created_at", 0) > 0 for b in ladder.banks.values())
    for h, bank in ladder.banks.items():
        fresh = SolutionBank(bank.tau, cfg.p, 2, cfg.c, oracle.evaluate(()))
        for e in range(6):
            simplified_process(fresh, e, oracle)
        assert [s.elements for s in fresh.solutions] == [s.elements for s in bank.solutions]


def test_ladder_contains_good_estimate():
    cfg = Config(epsilon=0.2, alpha=1.0)
    for idx in range(6):
        oracle = fixtures.random_cut(idx + 60, n=10)
        k = 3
        opt = oracle.evaluate(brute_force(oracle, range(oracle.n), k).set)
        if opt <= 0:
            continue
        _, ladder, _ = run_full(oracle, range(oracle.n), k, cfg, brute_force)
        taus = [ladder.tau_of(h) for h in ladder.banks]
        assert any((1 - cfg.eps_prime) * opt - 1e-9 <= t <= opt + 1e-9 for t in taus)


def test_full_guarantee_small_battery():
    eps = 0.2
    cfg = Config(epsilon=eps, alpha=1.0)
    for idx in range(6):
        oracle = fixtures.random_cut(idx + 80, n=10 + idx % 3)
        k = 2 + idx % 3
        opt = oracle.evaluate(brute_force(oracle, range(oracle.n), k).set)
        result, ladder, stats = run_full(oracle, range(oracle.n), k, cfg, brute_force)
        assert oracle.evaluate(result) >= (0.5 - eps) * opt - 1e-9
        assert stats.violations == 0
        budget = storage_budget(cfg.p, k, cfg.eps_prime, cfg.c)
        assert stats.peak_stored <= budget


def test_cached_values_recheckable():
    oracle = fixtures.random_cut(91, n=10)
    cfg = Config(epsilon=0.25, alpha=1.0)
    _, ladder, _ = run_full(oracle, range(oracle.n), 3, cfg, brute_force)
    for bank in ladder.banks.values():
        for sol in bank.solutions:
            assert sol.cached_value == pytest.approx(
                oracle.evaluate(tuple(sorted(sol.elements))), abs=1e-9)
            # per-bank solutions are pairwise disjoint
        ids = [e for sol in bank.solutions for e in sol.elements]
        assert len(ids) == len(set(ids))


def test_determinism():
    oracle = fixtures.random_cut(101, n=11)
    cfg = Config(epsilon=0.2, alpha=1.0)
    first, _, _ = run_full(oracle, range(oracle.n), 3, cfg, brute_force)
    second, _, _ = run_full(oracle, range(oracle.n), 3, cfg, brute_force)
    assert first == second


def test_random_greedy_offline_integration():
    oracle = fixtures.random_cut(111, n=10)
    offline, alpha = make_offline("random-greedy", seed=5)
    cfg = Config(epsilon=0.4, alpha=alpha)
    result, _, stats = run_full(oracle, range(oracle.n), 3, cfg, offline)
    assert len(result) <= 3
    assert stats.violations == 0


def test_full_process_wrong_oracle_rejected():
    oracle = ModularOracle([1.0, 2.0])
    other = ModularOracle([1.0, 2.0])
    ladder = GuessLadder(oracle, 1, Config(epsilon=0.5))
    with pytest.raises(InputError):
        full_process(ladder, 0, other)


def test_hard_instance_stream():
    oracle = make_hard_instance(3, 9)
    cfg = Config(epsilon=0.2, alpha=1.0)
    result, _, stats = run_full(oracle, range(oracle.n), 3, cfg, brute_force)
    value = oracle.evaluate(result)
    assert value >= (0.5 - 0.2) * oracle.opt_value()
    assert stats.violations == 0
