"""Randomized streaming: an r x m grid of threshold-greedy solutions.

Each arriving element is routed, independently for each of the r repetitions,
to a uniformly drawn part j in [m]; the (i, j) cell accepts it when the
marginal gain clears the threshold rho and the cell has room. Post-processing
returns a full cell if one exists, otherwise the better of the offline result
on the grid union and the first cell.

The j-draws come from a counter-based generator keyed by
(seed, repetition, element-index), so the conceptual parts V_{i,j} can be
reconstructed in tests without ever storing them.
"""

import math

from ._util import derived_seed, keyed_rng
from .errors import InputError, InvariantViolation
from .oracles import Oracle
from .threshold_stream import PartialSolution, StreamStats, _H_GUARD, _TOL


def default_repetitions(epsilon: float, c_r: float = 2.0) -> int:
    """r = ceil(C_r * ln(1/eps)/eps); C_r = 2 doubles the (1-eps)^r <= eps margin."""
    return max(1, math.ceil(c_r * math.log(1.0 / epsilon) / epsilon))


def part_draw(seed: int, repetition: int, index: int, parts: int) -> int:
    """The stateless j-draw for element `index` in repetition `repetition`."""
    return int(keyed_rng(seed, repetition, index).integers(parts))


class RandomizedState:
    """One streaming run of the grid algorithm at a fixed threshold rho."""

    def __init__(self, oracle: Oracle, k: int, rho: float, epsilon: float,
                 seed: int = 0, c_r: float = 2.0, strict: bool = False):
        if k < 1:
            raise InputError(f"capacity k must be >= 1, got {k}")
        if not (0.0 < epsilon <= 1.0):
            raise InputError(f"epsilon must be in (0, 1], got {epsilon}")
        self.oracle = oracle
        self.k = k
        self.rho = rho
        self.epsilon = epsilon
        self.seed = seed
        self.r = default_repetitions(epsilon, c_r)
        self.m = math.ceil(1.0 / epsilon)
        f_empty = oracle.evaluate(())
        self.grid = [[PartialSolution(k, f_empty) for _ in range(self.m)]
                     for _ in range(self.r)]
        self.elements_seen = 0
        self.strict = strict
        self.violations = []
        self.draw_log = []

    def process(self, e: int, index: int = None) -> int:
        """Route e once per repetition. Returns marginal computations used.

        `index` is the element's stream position; it defaults to the internal
        counter and must be supplied by wrappers that start states mid-stream.
        """
        t = self.elements_seen if index is None else index
        marginals = 0
        for i in range(self.r):
            j = part_draw(self.seed, i, t, self.m)
            self.draw_log.append((i, t, j))
            cell = self.grid[i][j]
            if cell.full():
                continue
            gain = self.oracle.evaluate(tuple(sorted(cell.elements + [e]))) - cell.cached_value
            marginals += 1
            if gain >= self.rho:
                cell.accept(e, gain)
                floor_value = self.rho * len(cell.elements)
                if cell.cached_value < floor_value - _TOL:
                    self.violations.append(
                        f"cell value bound failed: f={cell.cached_value} < "
                        f"rho*|S|={floor_value} at cell ({i}, {j})")
                    if self.strict:
                        raise InvariantViolation(self.violations[-1])
        self.elements_seen += 1
        return marginals

    def stored_elements(self) -> int:
        return sum(len(cell) for row in self.grid for cell in row)

    def full_cell(self):
        """Lowest (i, j) cell of size k, or None."""
        for i in range(self.r):
            for j in range(self.m):
                if self.grid[i][j].full():
                    return i, j
        return None

    def union(self) -> tuple:
        out = set()
        for row in self.grid:
            for cell in row:
                out.update(cell.elements)
        return tuple(sorted(out))


def randomized_process(state: RandomizedState, e: int, oracle: Oracle) -> RandomizedState:
    if oracle is not state.oracle:
        raise InputError("randomized_process called with a different oracle than the state's")
    state.process(e)
    return state


def st_greedy(oracle: Oracle, N, k: int, rho: float) -> tuple:
    """Single-threshold greedy over N in the given order; deterministic."""
    chosen = []
    value = oracle.evaluate(())
    for e in N:
        if len(chosen) >= k:
            break
        gain = oracle.evaluate(tuple(sorted(chosen + [e]))) - value
        if gain >= rho:
            chosen.append(e)
            value += gain
    return tuple(chosen)


def post_process(state: RandomizedState, oracle: Oracle, offline) -> tuple:
    """Full cell if any (lowest (i, j)); else best of offline-on-union and S_{1,1}."""
    cell = state.full_cell()
    if cell is not None:
        return tuple(sorted(state.grid[cell[0]][cell[1]].elements))
    result = offline(oracle, state.union(), state.k)
    first = state.grid[0][0]
    f_offline = oracle.evaluate(result.set)
    if f_offline >= first.cached_value:
        return tuple(result.set)
    return tuple(sorted(first.elements))


def run_randomized(oracle: Oracle, stream, k: int, rho: float, epsilon: float,
                   offline, seed: int = 0, c_r: float = 2.0,
                   strict: bool = False) -> tuple:
    """Known-threshold run over a whole stream: (solution, state, stats)."""
    state = RandomizedState(oracle, k, rho, epsilon, seed=seed, c_r=c_r, strict=strict)
    stats = StreamStats()
    for e in stream:
        marginals = state.process(e)
        stats.observe(state.stored_elements(), marginals)
    result = post_process(state, oracle, offline)
    stats.violations = len(state.violations)
    return result, state, stats


def run_randomized_with_guesses(oracle: Oracle, stream, k: int, epsilon: float,
                                alpha: float, offline, seed: int = 0,
                                c_r: float = 2.0, strict: bool = False) -> tuple:
    """Guessing wrapper: parallel grids for geometric guesses of the optimum.

    Guesses are powers of (1+eps) spanning [v/(1+eps), (1+alpha)kv/alpha],
    where v is the largest singleton seen so far; each guess g runs at
    rho = alpha/(1+alpha) * g/k. The window is one factor wider than
    [v, kv/alpha] at both ends: the bottom slack keeps the set non-empty
    (for k = alpha = 1 the bare window can miss every grid point), and the
    top slack makes mid-stream copies exact -- a guess created when v grew
    past (1+alpha)k*v_old/alpha has rho > v_old, so every earlier element's
    marginal gain (at most its singleton value, at most v_old) was below the
    threshold and would have been rejected anyway.
    """
    log_base = math.log1p(epsilon)
    c = alpha / (1.0 + alpha)
    states = {}
    v = 0.0
    stats = StreamStats()
    index = 0

    def rho_of(h: int) -> float:
        return c * (1.0 + epsilon) ** h / k

    def retarget():
        if v <= 0.0:
            states.clear()
            return
        h_lo = math.ceil(math.log(v) / log_base - 1.0 - _H_GUARD)
        h_hi = math.floor(math.log(v * k * (1.0 + alpha) / alpha) / log_base + _H_GUARD)
        for h in [h for h in states if h < h_lo or h > h_hi]:
            del states[h]
        for h in range(h_lo, h_hi + 1):
            if h not in states:
                state_seed = derived_seed(seed, h)
                states[h] = RandomizedState(oracle, k, rho_of(h), epsilon,
                                            seed=state_seed, c_r=c_r, strict=strict)

    for e in stream:
        singleton = oracle.evaluate((e,))
        if singleton > v:
            v = singleton
            retarget()
        marginals = 1
        for h in sorted(states):
            marginals += states[h].process(e, index=index)
        index += 1
        stats.observe(sum(s.stored_elements() for s in states.values()), marginals)
    best_set, best_value = (), -math.inf
    for h in sorted(states):
        cand = post_process(states[h], oracle, offline)
        value = oracle.evaluate(cand)
        if value > best_value:
            best_set, best_value = cand, value
        stats.violations += len(states[h].violations)
    return best_set, states, stats


def estimate_pe(oracle: Oracle, stream, e: int, m: int, k: int, rho: float,
                trials: int, seed: int = 0) -> float:
    """Monte Carlo estimate of Pr[e in STGreedy(X + e)] over 1/m-samples X.

    Test-only analysis probe; X keeps each stream element independently with
    probability 1/m, and the greedy runs in stream order.
    """
    if trials < 1:
        raise InputError("estimate_pe needs trials >= 1")
    order = list(stream)
    if e not in order:
        raise InputError(f"element {e} is not in the supplied stream order")
    hits = 0
    for t in range(trials):
        rng = keyed_rng(seed, t)
        keep = rng.random(len(order)) < 1.0 / m
        sample = [u for u, kept in zip(order, keep) if kept or u == e]
        result = st_greedy(oracle, sample, k, rho)
        hits += e in result
    return hits / trials
