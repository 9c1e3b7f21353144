"""Value oracles for non-negative submodular set functions.

Concrete families: weighted coverage, graph cuts (directed/undirected),
modular weights, the two-branch hard instance used for streaming lower
bounds, and a generic wrapper around an arbitrary Python set function.

Oracles are pure and deterministic; the only mutable state is the call
counter, which is lock-protected so concurrent read-only evaluation from
multiple workers stays correct.
"""

import operator
import threading

import numpy as np

from . import kernels
from ._util import ids_from_mask
from .errors import InputError


def _check_ids(S, n):
    """Canonicalize a collection of element ids to a sorted tuple.

    Duplicate ids are an input error (not silently deduplicated) so caller
    bugs surface early.
    """
    try:
        ids = sorted(operator.index(e) for e in S)
    except TypeError:
        raise InputError(f"element ids must be integers, got {S!r}")
    for e in ids:
        if e < 0 or e >= n:
            raise InputError(f"element id {e} out of range for ground set of size {n}")
    for a, b in zip(ids, ids[1:]):
        if a == b:
            raise InputError(f"duplicate element id {a} in set argument")
    return tuple(ids)


class Oracle:
    """Base value oracle over ground set {0, ..., n-1}."""

    def __init__(self, n: int):
        if n < 0:
            raise InputError("ground set size must be non-negative")
        self.n = int(n)
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def add_calls(self, count: int):
        """Bulk accounting used by the batch kernels."""
        with self._lock:
            self._calls += int(count)

    def evaluate(self, S) -> float:
        """f(S). Counts exactly one oracle call."""
        ids = _check_ids(S, self.n)
        with self._lock:
            self._calls += 1
        return self._value(ids)

    def marginal(self, e: int, S) -> float:
        """f(S + e) - f(S). Two oracle calls; zero (and no calls) if e in S."""
        e = operator.index(e)
        if e < 0 or e >= self.n:
            raise InputError(f"element id {e} out of range for ground set of size {self.n}")
        ids = _check_ids(S, self.n)
        if e in ids:
            return 0.0
        return self.evaluate(ids + (e,)) - self.evaluate(ids)

    def _value(self, ids: tuple) -> float:
        raise NotImplementedError

    def kernel_spec(self):
        """Descriptor consumed by the batch kernels, or None if unsupported."""
        return None


def eval_masks(oracle: Oracle, masks) -> np.ndarray:
    """Batch-evaluate f on subset bitmasks, with correct call accounting."""
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    spec = oracle.kernel_spec()
    if spec is not None:
        vals = kernels.eval_many(spec, masks)
        oracle.add_calls(masks.size)
        return vals
    return np.array([oracle.evaluate(ids_from_mask(int(m))) for m in masks], dtype=np.float64)


class ModularOracle(Oracle):
    """f(S) = sum of per-element weights (weights >= 0)."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1:
            raise InputError("modular weights must be a 1-d sequence")
        if np.any(w < 0):
            raise InputError("negative weight in modular oracle")
        super().__init__(len(w))
        self.weights = w

    def _value(self, ids):
        return float(sum(self.weights[e] for e in ids))

    def kernel_spec(self):
        if self.n > 64:
            return None
        empty = np.zeros(0, dtype=np.int64)
        return (1, self.n, empty, empty, self.weights, 0)


class CoverageOracle(Oracle):
    """f(S) = total weight of universe items covered by the union of S's sets."""

    def __init__(self, sets, weights=None):
        n = len(sets)
        tokens = {}
        rows = []
        for covered in sets:
            row = set()
            for item in covered:
                if item not in tokens:
                    tokens[item] = len(tokens)
                row.add(tokens[item])
            rows.append(row)
        u_size = len(tokens)
        w = np.ones(u_size, dtype=np.float64)
        if weights is not None:
            for item, weight in dict(weights).items():
                if weight < 0:
                    raise InputError(f"negative weight for universe item {item!r}")
                if item in tokens:
                    w[tokens[item]] = float(weight)
        super().__init__(n)
        self.universe_size = u_size
        self.item_weights = w
        self._rows = rows
        self._row_masks = np.array(
            [sum(1 << i for i in row) for row in rows], dtype=np.uint64
        )

    def _value(self, ids):
        covered = set()
        for e in ids:
            covered |= self._rows[e]
        return float(sum(self.item_weights[i] for i in covered))

    def kernel_spec(self):
        if self.n > 64 or self.universe_size > 64:
            return None
        empty = np.zeros(0, dtype=np.int64)
        return (2, self.n, self._row_masks, empty, self.item_weights, self.universe_size)


class CutOracle(Oracle):
    """f(S) = weight of edges leaving S (directed) or crossing (S, N-S)."""

    def __init__(self, edges, directed=False, n=None):
        us, vs, ws = [], [], []
        max_id = -1
        for edge in edges:
            if len(edge) == 2:
                u, v = edge
                w = 1.0
            else:
                u, v, w = edge
            u, v, w = int(u), int(v), float(w)
            if w < 0:
                raise InputError(f"negative edge weight on ({u}, {v})")
            max_id = max(max_id, u, v)
            if u == v:
                continue  # self-loops never cross
            us.append(u)
            vs.append(v)
            ws.append(w)
        if n is None:
            n = max_id + 1
        elif max_id >= n:
            raise InputError(f"edge endpoint {max_id} out of range for n={n}")
        super().__init__(max(n, 0))
        self.directed = bool(directed)
        self.edge_u = np.array(us, dtype=np.int64)
        self.edge_v = np.array(vs, dtype=np.int64)
        self.edge_w = np.array(ws, dtype=np.float64)

    def _value(self, ids):
        members = set(ids)
        total = 0.0
        for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w):
            in_u, in_v = u in members, v in members
            if self.directed:
                if in_u and not in_v:
                    total += w
            elif in_u != in_v:
                total += w
        return float(total)

    def kernel_spec(self):
        if self.n > 64:
            return None
        return (3, self.n, self.edge_u, self.edge_v, self.edge_w, int(self.directed))


class HardInstanceOracle(Oracle):
    """Two-branch hard instance: f(S) = |S| if w not in S, else k + |S ∩ U|.

    Ground set layout: ids 0..k-2 are u_1..u_{k-1}, ids k-1..k+h-2 are
    v_1..v_h, and id k+h-1 is the distinguished element w.
    """

    def __init__(self, k: int, h: int):
        if k < 1:
            raise InputError("hard instance requires k >= 1")
        if h < 1:
            raise InputError("hard instance requires h >= 1")
        super().__init__(k + h)
        self.k = int(k)
        self.h = int(h)
        self.u_ids = tuple(range(k - 1))
        self.v_ids = tuple(range(k - 1, k - 1 + h))
        self.w_id = k + h - 1

    def _value(self, ids):
        if self.w_id in ids:
            return float(self.k + sum(1 for e in ids if e < self.k - 1))
        return float(len(ids))

    def kernel_spec(self):
        if self.n > 64:
            return None
        empty = np.zeros(0, dtype=np.int64)
        return (4, self.n, empty, empty, np.zeros(0, dtype=np.float64), self.k)

    def opt_value(self) -> float:
        """Analytic optimum 2k-1, attained by {u_1..u_{k-1}, w}."""
        return float(2 * self.k - 1)

    def opt_set(self) -> tuple:
        return self.u_ids + (self.w_id,)


class FunctionOracle(Oracle):
    """Wrap an arbitrary Python set function f(frozenset) -> float."""

    def __init__(self, n, fn):
        super().__init__(n)
        self._fn = fn

    def _value(self, ids):
        return float(self._fn(frozenset(ids)))


def make_modular(weights) -> ModularOracle:
    return ModularOracle(weights)


def make_coverage(sets, weights=None) -> CoverageOracle:
    return CoverageOracle(sets, weights)


def make_cut(edges, directed=False, n=None) -> CutOracle:
    return CutOracle(edges, directed=directed, n=n)


def make_hard_instance(k: int, h: int) -> HardInstanceOracle:
    return HardInstanceOracle(k, h)


def load_edge_list(path, directed=False) -> CutOracle:
    """Parse `u v [w]` lines (default weight 1.0, `#` comments, 0-based ids)."""
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise InputError(f"{path}:{lineno}: expected 'u v [w]', got {raw!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed edge line {raw!r}")
            edges.append((u, v, w))
    return CutOracle(edges, directed=directed)


def load_coverage(path) -> CoverageOracle:
    """Parse `element: item item ...` lines plus optional `weight item w` lines."""
    rows = {}
    weights = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("weight "):
                parts = line.split()
                if len(parts) != 3:
                    raise InputError(f"{path}:{lineno}: expected 'weight item w'")
                try:
                    weights[parts[1]] = float(parts[2])
                except ValueError:
                    raise InputError(f"{path}:{lineno}: malformed weight {parts[2]!r}")
                continue
            if ":" not in line:
                raise InputError(f"{path}:{lineno}: expected 'element: item ...'")
            head, tail = line.split(":", 1)
            try:
                element = int(head.strip())
            except ValueError:
                raise InputError(f"{path}:{lineno}: element id must be an integer")
            if element < 0:
                raise InputError(f"{path}:{lineno}: element id must be non-negative")
            rows.setdefault(element, []).extend(tail.split())
    if not rows:
        return CoverageOracle([], weights)
    n = max(rows) + 1
    return CoverageOracle([rows.get(e, ()) for e in range(n)], weights)


def verify_submodular(oracle: Oracle, tol: float = 1e-9, mode: str = "auto",
                      samples: int = 2000, seed: int = 0) -> bool:
    """Check f(A)+f(B) >= f(A∩B)+f(A∪B) on all pairs (n <= 12) or a seeded sample."""
    n = oracle.n
    if mode not in ("auto", "exhaustive", "sampled"):
        raise InputError(f"unknown submodularity check mode {mode!r}")
    if mode == "exhaustive" and n > 12:
        raise InputError(f"exhaustive submodularity check capped at n=12, got n={n}")
    exhaustive = n <= 12 if mode == "auto" else mode == "exhaustive"
    if exhaustive:
        total = 1 << n
        all_masks = np.arange(total, dtype=np.uint64)
        table = eval_masks(oracle, all_masks)
        for a in range(total):
            au = np.uint64(a)
            lhs = table[a] + table
            rhs = table[(all_masks & au).astype(np.int64)] + table[(all_masks | au).astype(np.int64)]
            if np.any(lhs < rhs - tol):
                return False
        return True
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(samples):
        a = int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)
        b = int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)
        fa = oracle.evaluate(ids_from_mask(a))
        fb = oracle.evaluate(ids_from_mask(b))
        fi = oracle.evaluate(ids_from_mask(a & b))
        fu = oracle.evaluate(ids_from_mask(a | b))
        if fa + fb < fi + fu - tol:
            return False
    return True
