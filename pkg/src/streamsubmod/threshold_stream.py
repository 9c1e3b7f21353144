"""Single-pass threshold streaming with disjoint parallel solutions.

Two entry points:

* a known-estimate variant (`SolutionBank` + `simplified_process`/`simplified_finalize`)
  that assumes an estimate tau of the optimum value, and
* the full variant (`GuessLadder` + `full_process`/`full_finalize`) that
  maintains a geometric ladder of guesses from a running lower bound m and
  runs one bank of p solutions per guess.

Lemma-level inequalities (per-solution value bound, per-solution size bound,
ladder-shape identity, threshold admission) are checked after every element;
failures are collected on the state (and raised in strict mode) so a finished
run can report an invariant-violation count.
"""

import math
from dataclasses import dataclass, field

from .errors import InputError, InvariantViolation
from .oracles import Oracle

_TOL = 1e-9
_H_GUARD = 1e-12


@dataclass
class Config:
    """Parameters of a streaming run; defaults follow the guarantee proofs."""
    epsilon: float
    alpha: float = 1.0
    p: int = None          # solution count, default ceil(4/epsilon)
    eps_prime: float = None  # ladder granularity, default epsilon/2

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise InputError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if not (0.0 < self.alpha <= 1.0):
            raise InputError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.p is None:
            self.p = math.ceil(4.0 / self.epsilon)
        if self.p < 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        if self.eps_prime is None:
            self.eps_prime = self.epsilon / 2.0
        if not (0.0 < self.eps_prime < 1.0):
            raise InputError(f"eps_prime must be in (0, 1), got {self.eps_prime}")

    @property
    def c(self) -> float:
        return self.alpha / (1.0 + self.alpha)


class PartialSolution:
    """Ordered element list with an incrementally maintained f-value."""

    __slots__ = ("elements", "cached_value", "capacity")

    def __init__(self, capacity: int, f_empty: float):
        self.elements = []
        self.cached_value = f_empty
        self.capacity = capacity

    def __len__(self):
        return len(self.elements)

    def full(self) -> bool:
        return len(self.elements) >= self.capacity

    def accept(self, e: int, gain: float):
        self.elements.append(e)
        self.cached_value += gain


class SolutionBank:
    """p disjoint solutions sharing one threshold c*tau/k."""

    def __init__(self, tau: float, p: int, k: int, c: float, f_empty: float):
        self.tau = tau
        self.p = p
        self.k = k
        self.c = c
        self.f_empty = f_empty
        self.threshold = c * tau / k
        self.solutions = [PartialSolution(k, f_empty) for _ in range(p)]
        self.violations = []
        self.audit = []

    def best_cached(self) -> float:
        return max(sol.cached_value for sol in self.solutions)

    def stored_elements(self) -> int:
        return sum(len(sol) for sol in self.solutions)

    def union(self) -> tuple:
        out = []
        for sol in self.solutions:
            out.extend(sol.elements)
        return tuple(sorted(out))

    def process(self, e: int, oracle: Oracle, singleton: float = None):
        """Insert e into the lowest accepting solution, or discard it.

        Returns the number of marginal-value computations. Non-empty solutions
        form an index prefix (an element only reaches solution i+1 after
        rejection by i, and rejection at an empty solution rejects at every
        later, also empty, one) so the scan stops at the first empty solution.
        """
        marginals = 0
        for i, sol in enumerate(self.solutions):
            if not sol.elements:
                if singleton is None:
                    singleton = oracle.evaluate((e,))
                gain = singleton - self.f_empty
                marginals += 1
                if gain >= self.threshold:
                    self._admit(sol, i, e, gain)
                return marginals
            if sol.full():
                continue
            gain = oracle.evaluate(tuple(sorted(sol.elements + [e]))) - sol.cached_value
            marginals += 1
            if gain >= self.threshold:
                self._admit(sol, i, e, gain)
                return marginals
        return marginals

    def _admit(self, sol: PartialSolution, i: int, e: int, gain: float):
        sol.accept(e, gain)
        self.audit.append({"event": "accept", "tau": self.tau, "i": i,
                           "element": e, "gain": gain})
        if gain < self.threshold:
            self.violations.append(
                f"admission below threshold: gain {gain} < {self.threshold} (tau={self.tau}, i={i})")
        floor_value = self.threshold * len(sol.elements)
        if sol.cached_value < floor_value - _TOL:
            self.violations.append(
                f"per-solution value bound failed: f={sol.cached_value} < "
                f"{floor_value} at size {len(sol.elements)} (tau={self.tau}, i={i})")


def simplified_process(bank: SolutionBank, e: int, oracle: Oracle) -> SolutionBank:
    """One element of the known-estimate variant; at most p marginal computations."""
    bank.process(e, oracle)
    return bank


def _best_with_offline(solutions, union, oracle, offline, k):
    """Best of the offline solution on `union` and the given solutions.

    Value ties prefer the offline output, then the lowest solution index.
    """
    result = offline(oracle, union, k)
    offline_value = oracle.evaluate(result.set)
    best_set, best_value = tuple(result.set), offline_value
    for sol in solutions:
        if sol.cached_value > best_value:
            best_set, best_value = tuple(sorted(sol.elements)), sol.cached_value
    return best_set, best_value


def simplified_finalize(bank: SolutionBank, oracle: Oracle, offline) -> tuple:
    """Offline post-processing on the union, then the best of the p+1 solutions."""
    best_set, _ = _best_with_offline(
        bank.solutions, bank.union(), oracle, offline, bank.k)
    return best_set


class GuessLadder:
    """Running lower bound m plus one SolutionBank per surviving guess.

    Banks are keyed by the integer exponent h with tau = (1+eps')^h, so a
    guess keeps its identity across m updates.
    """

    def __init__(self, oracle: Oracle, k: int, config: Config, strict: bool = False):
        if k < 1:
            raise InputError(f"capacity k must be >= 1, got {k}")
        self.oracle = oracle
        self.k = k
        self.config = config
        self.c = config.c
        self.eps_prime = config.eps_prime
        self.strict = strict
        self.f_empty = oracle.evaluate(())
        self.m = self.f_empty
        self.banks = {}
        self.violations = []
        self.elements_seen = 0
        self._log_base = math.log1p(self.eps_prime)
        self._retarget()

    def guess_range(self, m: float = None):
        """Closed-form exponent range {h : m/(1+e') <= (1+e')^h <= mk/c}."""
        m = self.m if m is None else m
        if m <= 0.0:
            return None
        h_lo = math.ceil(math.log(m) / self._log_base - 1.0 - _H_GUARD)
        h_hi = math.floor(math.log(m * self.k / self.c) / self._log_base + _H_GUARD)
        return h_lo, h_hi

    def tau_of(self, h: int) -> float:
        return (1.0 + self.eps_prime) ** h

    def _retarget(self):
        rng = self.guess_range()
        if rng is None:
            self.banks.clear()
            return
        h_lo, h_hi = rng
        for h in [h for h in self.banks if h < h_lo or h > h_hi]:
            del self.banks[h]  # eagerly frees the stored elements
        for h in range(h_lo, h_hi + 1):
            if h not in self.banks:
                bank = SolutionBank(self.tau_of(h), self.config.p, self.k,
                                    self.c, self.f_empty)
                bank.created_at = self.elements_seen
                self.banks[h] = bank

    def stored_elements(self) -> int:
        return sum(bank.stored_elements() for bank in self.banks.values())

    def process(self, e: int) -> int:
        """One arriving element. Returns the marginal computations used."""
        singleton = self.oracle.evaluate((e,))
        marginals = 1
        m_prime = singleton
        for bank in self.banks.values():
            cached = bank.best_cached()
            if cached > m_prime:
                m_prime = cached
        if self.m < m_prime:
            self.m = m_prime
            self._retarget()
        for h in sorted(self.banks):
            marginals += self.banks[h].process(e, self.oracle, singleton=singleton)
        self.elements_seen += 1
        self._check_invariants()
        return marginals

    def _check_invariants(self):
        new = []
        rng = self.guess_range()
        expected = set() if rng is None else set(range(rng[0], rng[1] + 1))
        if set(self.banks) != expected:
            new.append(f"ladder shape mismatch: have {sorted(self.banks)}, "
                       f"expected {sorted(expected)} for m={self.m}")
        for h, bank in self.banks.items():
            size_cap = self.m * self.k / (self.c * bank.tau) + 1.0 + _TOL
            for i, sol in enumerate(bank.solutions):
                if len(sol) > self.k:
                    new.append(f"solution over capacity: |S|={len(sol)} (h={h}, i={i})")
                if len(sol) > size_cap:
                    new.append(f"size bound failed: |S|={len(sol)} > mk/(c*tau)+1="
                               f"{size_cap:.6g} (h={h}, i={i})")
            new.extend(bank.violations)
            bank.violations = []
        if new:
            self.violations.extend(new)
            if self.strict:
                raise InvariantViolation("; ".join(new))


def full_process(ladder: GuessLadder, e: int, oracle: Oracle) -> GuessLadder:
    """One element of the full variant (oracle must be the ladder's own)."""
    if oracle is not ladder.oracle:
        raise InputError("full_process called with a different oracle than the ladder's")
    ladder.process(e)
    return ladder


def full_finalize(ladder: GuessLadder, oracle: Oracle, offline) -> tuple:
    """Per-guess offline post-processing; best output across guesses.

    Returns the empty tuple when the ladder never materialized a guess.
    """
    best_set, best_value = (), -math.inf
    for h in sorted(ladder.banks):
        bank = ladder.banks[h]
        cand_set, cand_value = _best_with_offline(
            bank.solutions, bank.union(), oracle, offline, ladder.k)
        if cand_value > best_value:
            best_set, best_value = cand_set, cand_value
    return best_set


@dataclass
class StreamStats:
    """Per-run metrics mirroring the space/update-time theorem quantities."""
    peak_stored: int = 0
    max_marginals_per_element: int = 0
    violations: int = 0
    audit: list = field(default_factory=list)

    def observe(self, stored: int, marginals: int):
        self.peak_stored = max(self.peak_stored, stored)
        self.max_marginals_per_element = max(self.max_marginals_per_element, marginals)


def run_simplified(oracle: Oracle, stream, k: int, tau: float, config: Config,
                   offline) -> tuple:
    """Known-estimate run over a whole stream: (solution, bank, stats)."""
    f_empty = oracle.evaluate(())
    bank = SolutionBank(tau, config.p, k, config.c, f_empty)
    stats = StreamStats()
    for e in stream:
        marginals = bank.process(e, oracle)
        stats.observe(bank.stored_elements(), marginals)
    result = simplified_finalize(bank, oracle, offline)
    stats.violations = len(bank.violations)
    stats.audit = bank.audit
    return result, bank, stats


def run_full(oracle: Oracle, stream, k: int, config: Config, offline,
             strict: bool = False) -> tuple:
    """Full-variant run over a whole stream: (solution, ladder, stats)."""
    ladder = GuessLadder(oracle, k, config, strict=strict)
    stats = StreamStats()
    for e in stream:
        marginals = ladder.process(e)
        stats.observe(ladder.stored_elements(), marginals)
    result = full_finalize(ladder, oracle, offline)
    stats.violations = len(ladder.violations)
    for h in sorted(ladder.banks):
        stats.audit.extend(ladder.banks[h].audit)
    return result, ladder, stats


def storage_budget(p: int, k: int, eps_prime: float, c: float, constant: float = 8.0) -> float:
    """Desk-scale storage budget C*p*k*ln(k/c)/eps' for the stored-element count."""
    return constant * p * k * math.log(k / c) / eps_prime
