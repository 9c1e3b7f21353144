"""Fractional threshold streaming over the multilinear extension.

Each arriving element gets a p-fraction of itself added to a fractional
solution x when its derivative dF/dx_e clears c*tau/k, until ||x||_1 hits the
capacity k and the state freezes. Finalization rounds x and runs the offline
algorithm on the support, returning the better of the two.
"""

import math
from dataclasses import dataclass, field

from ._util import derived_seed
from .errors import InputError, InvariantViolation
from .extensions import EXACT_CAP, Estimate, FractionalPoint, partial_derivative
from .oracles import Oracle
from .rounding import pipage_round_deterministic, swap_round
from .threshold_stream import StreamStats, _H_GUARD, _TOL

_FREEZE_TOL = 1e-12


def extension_threshold_constant(alpha: float, p: float) -> float:
    """c = alpha*(1-p)/(1+alpha), the constant the guarantee proof fixes."""
    return alpha * (1.0 - p) / (1.0 + alpha)


class FractionalStreamState:
    """Single-owner state of one fractional streaming run."""

    def __init__(self, oracle: Oracle, k: int, tau: float, p: float,
                 alpha: float = 1.0, derivative_mode: str = None,
                 samples: int = None, seed: int = None, strict: bool = False):
        if k < 1:
            raise InputError(f"capacity k must be >= 1, got {k}")
        if not (0.0 < p < 1.0):
            raise InputError(f"per-element increment p must be in (0, 1), got {p}")
        if derivative_mode is None:
            derivative_mode = "exact" if oracle.n <= EXACT_CAP else "sampled"
        if derivative_mode not in ("exact", "sampled"):
            raise InputError(f"unknown derivative mode {derivative_mode!r}")
        if derivative_mode == "sampled" and (not samples or samples < 1):
            raise InputError("sampled derivative mode needs samples >= 1")
        self.oracle = oracle
        self.k = k
        self.tau = tau
        self.p = p
        self.alpha = alpha
        self.c = extension_threshold_constant(alpha, p)
        self.derivative_mode = derivative_mode
        self.samples = samples
        self.seed = seed
        self.strict = strict
        self.x = FractionalPoint(oracle.n)
        self.mass = 0.0
        self.frozen = False
        self.arrival_order = []
        self.elements_seen = 0
        self.violations = []
        self.audit = []

    @property
    def threshold(self) -> float:
        return self.c * self.tau / self.k

    def support_budget(self) -> int:
        return math.ceil(self.k / self.p)

    def derivative(self, e: int):
        if self.derivative_mode == "exact":
            return partial_derivative(self.oracle, self.x, e, mode="exact")
        return partial_derivative(
            self.oracle, self.x, e, mode="sampled", samples=self.samples,
            seed=derived_seed(self.seed or 0, self.elements_seen))

    def process(self, e: int):
        """One arriving element; no-op once the state is frozen."""
        self.elements_seen += 1
        if self.frozen:
            self.audit.append({"event": "frozen-skip", "element": e})
            return
        d = self.derivative(e)
        d_mean = d.mean if isinstance(d, Estimate) else d
        if d_mean >= self.threshold:
            inc = min(self.p, self.k - self.mass)
            self.x.set_coord(e, self.x[e] + inc)
            self.mass += inc
            if abs(self.mass - self.k) <= _FREEZE_TOL:
                self.mass = float(self.k)
                self.frozen = True
            self.arrival_order.append(e)
            self.audit.append({"event": "accept", "element": e, "dFdx": d_mean,
                               "increment": inc})
        else:
            self.audit.append({"event": "reject", "element": e, "dFdx": d_mean})
        self._check_invariants()

    def _check_invariants(self):
        new = []
        if self.mass > self.k + _TOL:
            new.append(f"mass {self.mass} exceeds capacity {self.k}")
        if len(self.x.coords) > self.support_budget():
            new.append(f"support {len(self.x.coords)} exceeds ceil(k/p)="
                       f"{self.support_budget()}")
        deviants = [v for v in self.x.coords.values() if abs(v - self.p) > 1e-12]
        if deviants:
            structure_ok = (len(deviants) == 1 and deviants[0] < self.p - 1e-12
                            and self.frozen)
            if not structure_ok:
                new.append(f"coordinate structure violated: non-p values {deviants}, "
                           f"frozen={self.frozen}")
        if new:
            self.violations.extend(new)
            if self.strict:
                raise InvariantViolation("; ".join(new))

    def stored_elements(self) -> int:
        return len(self.x.coords)


def extension_process(state: FractionalStreamState, e: int, oracle: Oracle) -> FractionalStreamState:
    if oracle is not state.oracle:
        raise InputError("extension_process called with a different oracle than the state's")
    state.process(e)
    return state


def extension_finalize(state: FractionalStreamState, oracle: Oracle, offline,
                       rounding_mode: str = "pipage", seed: int = None) -> tuple:
    """Round x and post-process the support; ties prefer the offline output."""
    if rounding_mode == "pipage":
        rounded = pipage_round_deterministic(oracle, state.x, state.k)
    elif rounding_mode == "swap":
        rounded = swap_round(oracle, state.x, state.k, seed=0 if seed is None else seed)
    else:
        raise InputError(f"unknown rounding mode {rounding_mode!r}")
    support = state.x.support()
    result = offline(oracle, support, state.k)
    f_rounded = oracle.evaluate(rounded)
    f_offline = oracle.evaluate(result.set)
    if f_offline >= f_rounded:
        return tuple(result.set)
    return tuple(rounded)


def run_extension(oracle: Oracle, stream, k: int, tau: float, p: float,
                  alpha: float = 1.0, offline=None, derivative_mode: str = None,
                  samples: int = None, seed: int = None,
                  rounding_mode: str = "pipage", strict: bool = False) -> tuple:
    """Known-estimate fractional run: (solution, state, stats)."""
    state = FractionalStreamState(oracle, k, tau, p, alpha=alpha,
                                  derivative_mode=derivative_mode,
                                  samples=samples, seed=seed, strict=strict)
    stats = StreamStats()
    for e in stream:
        state.process(e)
        stats.observe(state.stored_elements(), 1)
    result = extension_finalize(state, oracle, offline, rounding_mode=rounding_mode,
                                seed=seed)
    stats.violations = len(state.violations)
    stats.audit = state.audit
    return result, state, stats


@dataclass
class _LadderedStates:
    """Parallel fractional states for a geometric ladder of tau guesses."""
    m: float = 0.0
    states: dict = field(default_factory=dict)
    created_at: dict = field(default_factory=dict)


def run_extension_with_guesses(oracle: Oracle, stream, k: int, epsilon: float,
                               alpha: float = 1.0, offline=None,
                               derivative_mode: str = None, samples: int = None,
                               seed: int = None, rounding_mode: str = "pipage",
                               strict: bool = False) -> tuple:
    """Fractional streaming without a known tau.

    Reuses the guess-ladder mechanics with granularity eps' = epsilon/8 (the
    estimate quality the guarantee needs) and p = epsilon/2. The running lower
    bound m tracks max{f(empty), singleton values}: every value in
    [m, km/c] is then bracketed by the ladder, and states created mid-stream
    are valid because each earlier element e had f({e}) - f(empty) <= m_old <
    c*tau_new/k, so a fresh state would have rejected it anyway.
    """
    p = epsilon / 2.0
    eps_prime = epsilon / 8.0
    c = extension_threshold_constant(alpha, p)
    log_base = math.log1p(eps_prime)
    f_empty = oracle.evaluate(())
    lad = _LadderedStates(m=f_empty)
    stats = StreamStats()
    elements_seen = 0

    def retarget():
        if lad.m <= 0.0:
            lad.states.clear()
            return
        h_lo = math.ceil(math.log(lad.m) / log_base - 1.0 - _H_GUARD)
        h_hi = math.floor(math.log(lad.m * k / c) / log_base + _H_GUARD)
        for h in [h for h in lad.states if h < h_lo or h > h_hi]:
            del lad.states[h]
        for h in range(h_lo, h_hi + 1):
            if h not in lad.states:
                lad.states[h] = FractionalStreamState(
                    oracle, k, (1.0 + eps_prime) ** h, p, alpha=alpha,
                    derivative_mode=derivative_mode, samples=samples,
                    seed=None if seed is None else derived_seed(seed, h),
                    strict=strict)
                lad.created_at[h] = elements_seen

    retarget()
    for e in stream:
        singleton = oracle.evaluate((e,))
        if singleton > lad.m:
            lad.m = singleton
            retarget()
        for h in sorted(lad.states):
            lad.states[h].process(e)
        elements_seen += 1
        stats.observe(sum(s.stored_elements() for s in lad.states.values()),
                      1 + len(lad.states))
    best_set, best_value = (), -math.inf
    for h in sorted(lad.states):
        cand = extension_finalize(lad.states[h], oracle, offline,
                                  rounding_mode=rounding_mode, seed=seed)
        value = oracle.evaluate(cand)
        if value > best_value:
            best_set, best_value = cand, value
        stats.violations += len(lad.states[h].violations)
    return best_set, lad, stats
