"""Named invariant batteries behind the CLI `verify` subcommand.

Each suite returns a list of CheckResult(name, ok, detail); the CLI prints
one line per check and exits non-zero when any check fails. The pytest suite
drives the same functions, so the shipped fixtures are validated both ways.
"""

import math
from collections import namedtuple

import numpy as np

from ._util import ids_from_mask, rng_from
from .extensions import (FractionalPoint, lovasz, multilinear_exact,
                         multilinear_sample)
from .errors import InputError
from . import fixtures
from .offline import brute_force, plain_greedy, random_greedy
from .oracles import eval_masks, verify_submodular
from .randomized_stream import RandomizedState, part_draw, run_randomized
from .rounding import pipage_round_deterministic, swap_round
from .threshold_stream import Config, run_full, run_simplified, storage_budget
from .extension_stream import run_extension

CheckResult = namedtuple("CheckResult", "name ok detail")


def _check(name, ok, detail=""):
    return CheckResult(name, bool(ok), detail)


def _family_oracles(include_fault=False):
    oracles = [
        ("coverage", fixtures.random_coverage(11, n=8)),
        ("cut", fixtures.random_cut(12, n=8)),
        ("modular", fixtures.random_modular(13, n=8)),
        ("hard", fixtures.mixed_oracle(3, n_max=8)),
    ]
    if include_fault:
        oracles.append(("supermodular-fault", fixtures.supermodular_square(6)))
    return oracles


# ---------------------------------------------------------------- oracles --

def suite_oracles(include_fault=False):
    checks = []

    bad = []
    for name, oracle in _family_oracles(include_fault):
        rng = rng_from(101)
        for _ in range(1000):
            mask = int(rng.integers(0, 1 << oracle.n))
            if oracle.evaluate(ids_from_mask(mask)) < 0:
                bad.append(name)
                break
    checks.append(_check("non-negativity", not bad, f"negative value in {bad}" if bad else ""))

    # diminishing returns via covering pairs A subset B with |B \ A| = 1;
    # transitivity extends the check to every A subset B.
    dr_bad = []
    for name, oracle in _family_oracles(include_fault):
        n = oracle.n
        table = eval_masks(oracle, np.arange(1 << n, dtype=np.uint64))
        ok = True
        for e in range(n):
            ebit = 1 << e
            for b in range(1 << n):
                if b & ebit:
                    continue
                marg_b = table[b | ebit] - table[b]
                for d in range(n):
                    dbit = 1 << d
                    if d == e or not (b & dbit):
                        continue
                    a = b & ~dbit
                    marg_a = table[a | ebit] - table[a]
                    if marg_a < marg_b - 1e-9:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if not ok:
            dr_bad.append(name)
    checks.append(_check("diminishing-returns", not dr_bad,
                         f"violated by {dr_bad}" if dr_bad else ""))

    oracle = fixtures.random_coverage(21, n=6)
    before = oracle.calls
    oracle.evaluate((0, 1))
    oracle.marginal(2, (0, 1))
    oracle.marginal(0, (0, 1))  # member: no calls
    eval_masks(oracle, np.arange(8, dtype=np.uint64))
    expected = before + 1 + 2 + 0 + 8
    checks.append(_check("call-accounting", oracle.calls == expected,
                         f"counter {oracle.calls} != expected {expected}"))

    probe_bad = []
    for name, oracle in [("hard", fixtures.mixed_oracle(3, n_max=8)),
                         ("coverage", fixtures.random_coverage(31, n=8)),
                         ("offset-coverage", fixtures.offset_coverage(32, n=8))]:
        p = 0.35
        rng = rng_from(202)
        f_empty = oracle.evaluate(())
        draws = np.empty(10_000)
        probs = rng.uniform(0.0, p, size=oracle.n)
        for t in range(draws.size):
            mask = 0
            u = rng.random(oracle.n)
            for e in range(oracle.n):
                if u[e] < probs[e]:
                    mask |= 1 << e
            draws[t] = oracle.evaluate(ids_from_mask(mask))
        mean = draws.mean()
        stderr = draws.std(ddof=1) / math.sqrt(draws.size)
        if mean < (1 - p) * f_empty - 3 * stderr:
            probe_bad.append(name)
    checks.append(_check("sampled-set-lower-bound", not probe_bad,
                         f"violated by {probe_bad}" if probe_bad else ""))

    sub_bad = []
    for name, oracle in _family_oracles(include_fault):
        is_sub = verify_submodular(oracle)
        if not is_sub:
            sub_bad.append(name)
    checks.append(_check("submodularity", not sub_bad,
                         f"violated by {sub_bad}" if sub_bad else ""))
    return checks


# -------------------------------------------------------------- extensions --

def _pairs(count, n_max=10, max_mass=None):
    out = []
    for idx in range(count):
        oracle = fixtures.mixed_oracle(idx, n_max=n_max)
        out.append((oracle, fixtures.random_point(idx + 500, oracle.n, max_mass=max_mass)))
    return out


def suite_extensions():
    checks = []

    agree_bad = 0
    for idx in range(4):
        oracle = fixtures.mixed_oracle(idx, n_max=8)
        for mask in range(1 << oracle.n):
            S = ids_from_mask(mask)
            x = FractionalPoint.indicator(S, oracle.n)
            f_val = oracle.evaluate(S)
            if abs(multilinear_exact(oracle, x) - f_val) > 1e-9:
                agree_bad += 1
            if abs(lovasz(oracle, x) - f_val) > 1e-9:
                agree_bad += 1
    checks.append(_check("integral-agreement", agree_bad == 0,
                         f"{agree_bad} integral points disagree"))

    lb_bad = 0
    for oracle, x in _pairs(200):
        if lovasz(oracle, x) > multilinear_exact(oracle, x) + 1e-9:
            lb_bad += 1
    checks.append(_check("lovasz-lower-bounds-multilinear", lb_bad == 0,
                         f"{lb_bad}/200 pairs violated"))

    scale_bad = 0
    for oracle, x in _pairs(100):
        fx = lovasz(oracle, x)
        for c in (0.1, 0.3, 0.5, 0.7, 0.9):
            scaled = FractionalPoint(x.n, {e: c * v for e, v in x.coords.items()})
            if lovasz(oracle, scaled) < c * fx - 1e-9:
                scale_bad += 1
    checks.append(_check("restricted-scale-invariance", scale_bad == 0,
                         f"{scale_bad} scalings violated"))

    convex_bad = 0
    for idx in range(100):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        x = fixtures.random_point(idx + 900, oracle.n)
        y = fixtures.random_point(idx + 1900, oracle.n)
        c = (idx % 9 + 1) / 10.0
        mix = FractionalPoint(oracle.n)
        for e in set(x.coords) | set(y.coords):
            mix.set_coord(e, c * x[e] + (1 - c) * y[e])
        if lovasz(oracle, mix) > c * lovasz(oracle, x) + (1 - c) * lovasz(oracle, y) + 1e-9:
            convex_bad += 1
    checks.append(_check("lovasz-convexity", convex_bad == 0,
                         f"{convex_bad}/100 triples violated"))

    damp_bad = 0
    for idx in range(100):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        rng = rng_from(idx + 4000)
        ids = rng.permutation(oracle.n)
        half = max(1, oracle.n // 2)
        p = float(rng.uniform(0.1, 0.9))
        x = FractionalPoint(oracle.n, {int(e): float(rng.uniform(0.1, 1.0)) for e in ids[:half]})
        y = FractionalPoint(oracle.n, {int(e): float(rng.uniform(0.0, p)) for e in ids[half:]})
        combined = FractionalPoint(oracle.n, {**x.coords, **y.coords})
        if multilinear_exact(oracle, combined) < (1 - p) * multilinear_exact(oracle, x) - 1e-9:
            damp_bad += 1
    checks.append(_check("disjoint-support-damping", damp_bad == 0,
                         f"{damp_bad}/100 pairs violated"))

    lin_bad = 0
    for idx in range(50):
        oracle = fixtures.mixed_oracle(idx, n_max=8)
        rng = rng_from(idx + 6000)
        x = fixtures.random_point(idx + 700, oracle.n)
        e = int(rng.integers(oracle.n))
        t = float(rng.uniform(0.05, 0.95))
        f0 = multilinear_exact(oracle, x.with_coord(e, 0.0))
        f1 = multilinear_exact(oracle, x.with_coord(e, 1.0))
        ft = multilinear_exact(oracle, x.with_coord(e, t))
        if abs(ft - ((1 - t) * f0 + t * f1)) > 1e-9:
            lin_bad += 1
    checks.append(_check("coordinate-multilinearity", lin_bad == 0,
                         f"{lin_bad}/50 collinearity checks violated"))

    samp_bad = 0
    for idx in range(8):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        x = fixtures.random_point(idx + 800, oracle.n)
        exact = multilinear_exact(oracle, x)
        est = multilinear_sample(oracle, x, samples=100_000, seed=idx)
        if abs(est.mean - exact) > 3 * est.stderr + 1e-12:
            samp_bad += 1
    checks.append(_check("sampled-matches-exact", samp_bad == 0,
                         f"{samp_bad}/8 sampled estimates off by >3 stderr"))
    return checks


# ----------------------------------------------------------------- rounding --

def suite_rounding():
    checks = []
    feas_bad = 0
    marg_bad = 0
    seeds = 10_000
    for idx in range(20):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        k = max(2, oracle.n // 3)
        x = fixtures.random_point(idx + 300, oracle.n, max_mass=float(k))
        counts = {e: 0 for e in x.support()}
        for seed in range(seeds):
            S = swap_round(oracle, x, k, seed)
            if len(S) > k:
                feas_bad += 1
            for e in S:
                if e in counts:
                    counts[e] += 1
        for e, v in x.coords.items():
            freq = counts[e] / seeds
            sigma = math.sqrt(max(v * (1 - v), 1e-12) / seeds)
            if abs(freq - v) > 4 * sigma:
                marg_bad += 1
    checks.append(_check("swap-feasibility", feas_bad == 0,
                         f"{feas_bad} infeasible outputs"))
    checks.append(_check("swap-marginal-preservation", marg_bad == 0,
                         f"{marg_bad} coordinates outside the 4-sigma band"))

    mass_bad = 0
    rng = rng_from(77)
    from .rounding import _pair_moves
    for _ in range(1000):
        a, b = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
        (a1, b1), (a2, b2), prob = _pair_moves(a, b)
        if abs((a1 + b1) - (a + b)) > 1e-12 or abs((a2 + b2) - (a + b)) > 1e-12:
            mass_bad += 1
        if not (0.0 <= prob <= 1.0):
            mass_bad += 1
    checks.append(_check("pairwise-mass-conservation", mass_bad == 0,
                         f"{mass_bad} moves broke mass or probability bounds"))

    pip_bad = 0
    for idx in range(50):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        k = max(2, oracle.n // 3)
        x = fixtures.random_point(idx + 300, oracle.n, max_mass=float(k))
        fx = multilinear_exact(oracle, x)
        S = pipage_round_deterministic(oracle, x, k)
        if len(S) > k or oracle.evaluate(S) < fx - 1e-9:
            pip_bad += 1
    checks.append(_check("pipage-value-nondecrease", pip_bad == 0,
                         f"{pip_bad}/50 instances lost value or feasibility"))
    return checks


# ------------------------------------------------------------------ offline --

def suite_offline():
    checks = []
    scope_bad = 0
    dominance_bad = 0
    for idx in range(30):
        oracle = fixtures.mixed_oracle(idx, n_max=10)
        rng = rng_from(idx + 50)
        U = sorted(int(e) for e in rng.choice(oracle.n, size=max(2, oracle.n - 2), replace=False))
        k = max(1, len(U) // 3)
        bf = brute_force(oracle, U, k)
        rg = random_greedy(oracle, U, k, seed=idx)
        pg = plain_greedy(oracle, U, k)
        for res in (bf, rg, pg):
            if not set(res.set) <= set(U) or len(res.set) > k:
                scope_bad += 1
        v_bf = oracle.evaluate(bf.set)
        v_rg = oracle.evaluate(rg.set)
        if not (v_bf >= v_rg - 1e-12 and v_rg >= -1e-12):
            dominance_bad += 1
    checks.append(_check("output-scope", scope_bad == 0, f"{scope_bad} out-of-scope outputs"))
    checks.append(_check("brute-force-dominates", dominance_bad == 0,
                         f"{dominance_bad} dominance violations"))

    mono_bad = 0
    for idx in range(10):
        oracle = fixtures.random_coverage(idx + 600, n=9)
        U = list(range(oracle.n))
        k = 3
        opt = oracle.evaluate(brute_force(oracle, U, k).set)
        vals = np.array([oracle.evaluate(random_greedy(oracle, U, k, seed=s).set)
                         for s in range(100)])
        bound = (1 - 1 / math.e) * opt
        if vals.mean() < bound - 3 * vals.std(ddof=1) / 10:
            mono_bad += 1
    checks.append(_check("random-greedy-monotone-sanity", mono_bad == 0,
                         f"{mono_bad}/10 monotone instances under (1-1/e)OPT"))
    return checks


# ---------------------------------------------------------------- threshold --

def _threshold_battery(count=12):
    runs = []
    for idx in range(count):
        oracle = fixtures.random_cut(idx + 7000, n=8 + idx % 5)
        k = 2 + idx % 3
        config = Config(epsilon=0.25, alpha=1.0)
        result, ladder, stats = run_full(oracle, range(oracle.n), k, config, brute_force)
        runs.append((oracle, k, config, result, ladder, stats))
    return runs


def suite_threshold():
    checks = []
    runs = _threshold_battery()
    visited = sum(s.violations for *_, s in runs)
    checks.append(_check("lemma-bounds-and-ladder-shape", visited == 0,
                         f"{visited} runtime invariant violations"))

    late_bad = 0
    for oracle, k, config, _, ladder, _ in runs[:6]:
        for h in sorted(ladder.banks):
            bank = ladder.banks[h]
            fresh_config = Config(epsilon=config.epsilon, alpha=config.alpha,
                                  p=config.p, eps_prime=config.eps_prime)
            _, fresh, _ = run_simplified(oracle, range(oracle.n), k, bank.tau,
                                         fresh_config, brute_force)
            got = [tuple(sol.elements) for sol in bank.solutions]
            want = [tuple(sol.elements) for sol in fresh.solutions]
            if got != want:
                late_bad += 1
    checks.append(_check("late-start-equivalence", late_bad == 0,
                         f"{late_bad} banks differ from a full replay"))

    budget_bad = 0
    for oracle, k, config, _, ladder, stats in runs:
        budget = storage_budget(config.p, k, config.eps_prime, config.c)
        if stats.peak_stored > budget:
            budget_bad += 1
    checks.append(_check("stored-element-budget", budget_bad == 0,
                         f"{budget_bad} runs exceeded the C=8 budget"))

    det_bad = 0
    for oracle, k, config, result, _, _ in runs[:4]:
        again, _, _ = run_full(oracle, range(oracle.n), k, config, brute_force)
        if again != result:
            det_bad += 1
    checks.append(_check("determinism", det_bad == 0, f"{det_bad} reruns diverged"))

    admission_bad = 0
    for oracle, k, config, _, ladder, stats in runs:
        for rec in stats.audit:
            if rec["gain"] < config.c * rec["tau"] / k:
                admission_bad += 1
    checks.append(_check("threshold-admission-log", admission_bad == 0,
                         f"{admission_bad} accepted below threshold"))
    return checks


# --------------------------------------------------------- extension-stream --

def suite_extension_stream():
    checks = []
    inv_bad = 0
    mass_bound_bad = 0
    reject_bad = 0
    for idx in range(10):
        oracle = fixtures.random_cut(idx + 8800, n=8 + idx % 4)
        k = 2 + idx % 2
        opt = brute_force(oracle, range(oracle.n), k)
        opt_val = oracle.evaluate(opt.set)
        if opt_val <= 0:
            continue
        eps = 0.4
        tau = (1 - eps / 8) * opt_val
        result, state, stats = run_extension(
            oracle, range(oracle.n), k, tau, p=eps / 2, alpha=1.0,
            offline=brute_force, derivative_mode="exact")
        inv_bad += stats.violations
        if state.frozen:
            if multilinear_exact(oracle, state.x) < state.c * tau - 1e-9:
                mass_bound_bad += 1
        else:
            missing = sorted(set(opt.set) - set(state.x.support()))
            if missing:
                b = len(missing) / k
                augmented = state.x.copy()
                for e in missing:
                    augmented.set_coord(e, 1.0)
                lhs = multilinear_exact(oracle, augmented)
                rhs = multilinear_exact(oracle, state.x) + b * state.c * tau
                if lhs > rhs + 1e-9:
                    reject_bad += 1
    checks.append(_check("structure-and-support-invariants", inv_bad == 0,
                         f"{inv_bad} runtime violations"))
    checks.append(_check("full-mass-value-bound", mass_bound_bad == 0,
                         f"{mass_bound_bad} frozen runs below c*tau"))
    checks.append(_check("rejection-derivative-bound", reject_bad == 0,
                         f"{reject_bad} runs broke F(x + 1_rest) <= F(x) + b*c*tau"))
    return checks


# --------------------------------------------------------------- randomized --

def suite_randomized():
    checks = []
    cell_bad = 0
    storage_bad = 0
    for idx in range(6):
        oracle = fixtures.random_cut(idx + 9900, n=8 + idx % 4)
        k = 2 + idx % 2
        opt_val = oracle.evaluate(brute_force(oracle, range(oracle.n), k).set)
        rho = 0.5 * opt_val / k
        for seed in range(5):
            _, state, stats = run_randomized(oracle, range(oracle.n), k, rho,
                                             epsilon=0.25, offline=brute_force, seed=seed)
            cell_bad += stats.violations
            if state.stored_elements() > state.r * state.m * k:
                storage_bad += 1
    checks.append(_check("per-cell-value-bound", cell_bad == 0,
                         f"{cell_bad} cell-bound violations"))
    checks.append(_check("grid-storage-bound", storage_bad == 0,
                         f"{storage_bad} grids exceeded r*m*k"))

    oracle = fixtures.random_cut(12345, n=10)
    k = 3
    rho = 0.3
    _, s1, _ = run_randomized(oracle, range(oracle.n), k, rho, epsilon=0.25,
                              offline=brute_force, seed=7)
    _, s2, _ = run_randomized(oracle, range(oracle.n), k, rho, epsilon=0.25,
                              offline=brute_force, seed=7)
    same = all(s1.grid[i][j].elements == s2.grid[i][j].elements
               for i in range(s1.r) for j in range(s1.m))
    checks.append(_check("seeded-determinism", same, "grids diverged for equal seeds"))

    parts_bad = 0
    n = 9
    state = RandomizedState(fixtures.random_cut(777, n=n), k=3, rho=0.1, epsilon=0.25, seed=5)
    for t in range(n):
        state.process(t)
    for i in range(state.r):
        parts = [[] for _ in range(state.m)]
        for t in range(n):
            parts[part_draw(5, i, t, state.m)].append(t)
        flat = sorted(e for part in parts for e in part)
        if flat != list(range(n)):
            parts_bad += 1
        logged = sorted((tt, jj) for (ii, tt, jj) in state.draw_log if ii == i)
        recomputed = sorted((t, part_draw(5, i, t, state.m)) for t in range(n))
        if logged != recomputed:
            parts_bad += 1
    checks.append(_check("partition-property", parts_bad == 0,
                         f"{parts_bad} repetitions failed partition reconstruction"))
    return checks


SUITES = {
    "oracles": suite_oracles,
    "extensions": suite_extensions,
    "rounding": suite_rounding,
    "offline": suite_offline,
    "threshold": suite_threshold,
    "extension-stream": suite_extension_stream,
    "randomized": suite_randomized,
}

# demonstrates fault detection: expected to FAIL (exit 1); not part of `all`
FAULT_SUITE = "fault-injection"


def run_suite(name: str):
    """Run one named suite (or `all`). Returns a list of (suite, CheckResult)."""
    if name == FAULT_SUITE:
        return [(FAULT_SUITE, c) for c in suite_oracles(include_fault=True)]
    if name == "all":
        out = []
        for suite_name in SUITES:
            out.extend((suite_name, c) for c in SUITES[suite_name]())
        return out
    if name not in SUITES:
        raise InputError(
            f"unknown verify suite {name!r}; choose from "
            f"{sorted(SUITES) + ['all', FAULT_SUITE]}")
    return [(name, c) for c in SUITES[name]()]
