"""Value oracles and the built-in instance families.

A :class:`ValueOracle` wraps a deterministic nonnegative function over one
domain (an :class:`~latmax.lattice.IntLattice` or a
:class:`~latmax.lattice.DistributiveLattice`) and counts every evaluation.
Integer-lattice points are tuples; distributive-lattice points are ideal
masks (``Ideal`` objects are accepted too).
"""
import random
import threading

import numpy as np

from ._common import TAU, DomainError, DomainTooLargeError, enum_limit
from .lattice import (
    DistributiveLattice,
    IntLattice,
    Poset,
    bits,
    chain_mask_to_point,
    ideal_masks,
    linear_extension,
)


class ValueOracle:
    """Counted, deterministic access to ``f`` on a lattice domain.

    ``__call__`` validates its argument; ``raw`` skips validation for callers
    that construct in-domain points themselves (the solvers).  Both count.
    """

    def __init__(self, domain, func, family="custom", params=None, table=None):
        self.domain = domain
        self._func = func
        self.family = family
        self.params = dict(params or {})
        self.table = table
        self._lock = threading.Lock()
        self._queries = 0

    @property
    def queries(self):
        return self._queries

    def reset_queries(self):
        with self._lock:
            self._queries = 0

    @property
    def is_lattice(self):
        return isinstance(self.domain, IntLattice)

    def raw(self, key):
        v = self._func(key)
        with self._lock:
            self._queries += 1
        if v < -TAU:
            raise DomainError(f"oracle {self.family} returned negative value {v} at {key!r}")
        return v

    def __call__(self, point):
        return self.raw(self.domain.check(point))

    def values(self, keys):
        return [self.raw(k) for k in keys]

    def __repr__(self):
        return f"ValueOracle({self.family}, {self.domain})"


# --- integer-lattice families ------------------------------------------------


def make_table_lattice(n, C, values, family="table", params=None):
    """Explicit table over ``[0..C]^n`` in mixed-radix order (``x_1`` least significant)."""
    dom = IntLattice(n, C)
    values = [float(v) for v in values]
    if len(values) != dom.size:
        raise DomainError(f"table has {len(values)} entries, domain has {dom.size}")
    if min(values) < 0:
        raise DomainError("table values must be nonnegative")
    base = C + 1

    def f(x):
        idx = 0
        for v in reversed(x):
            idx = idx * base + v
        return values[idx]

    p = {"values": values} if params is None else params
    return ValueOracle(dom, f, family, p, table=values)


def make_fig3(epsilon=0.1):
    """Tight instance on ``{0,1,2}^3``: optimum 3 at (1,1,1), double greedy gets 1+epsilon."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    high = {(2, 0, 2), (2, 2, 0), (0, 2, 2), (2, 0, 0), (0, 2, 0), (0, 0, 2), (2, 0, 1), (0, 2, 1)}

    def f(a):
        if a in high:
            return 1.0 + epsilon
        return float(min(sum(1 for v in a if v > 0), sum(1 for v in a if v < 2)))

    dom = IntLattice(3, 2)
    table = [f(x) for x in dom.points()]
    return ValueOracle(dom, f, "fig3", {"epsilon": epsilon}, table=table)


def make_fig4(x=1.0):
    """Submodular (for ``x >= 1``) but not DR function on ``{0,1,2}^2``; maximum ``x`` at (0,2)."""
    if not x >= 1:
        raise DomainError("fig4 requires x >= 1 (submodularity fails below)")
    vals = {(0, 0): 1.0, (0, 1): 1.0, (1, 0): 2.0, (0, 2): float(x), (1, 1): 1.0,
            (2, 0): 3.0, (1, 2): 1.0, (2, 1): 2.0, (2, 2): 2.0}
    dom = IntLattice(2, 2)
    return ValueOracle(dom, vals.__getitem__, "fig4", {"x": x},
                       table=[vals[p] for p in dom.points()])


def make_lemma4_counterexample(C, epsilon=0.1):
    """0 at (0,0) and (C,C), 1 at (C,0), epsilon elsewhere on ``[0..C]^2``."""
    if C < 1:
        raise DomainError("C must be at least 1")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    eps = float(epsilon)

    def f(x):
        if x == (C, 0):
            return 1.0
        if (x[0] == 0 and x[1] == 0) or (x[0] == C and x[1] == C):
            return 0.0
        return eps

    return ValueOracle(IntLattice(2, C), f, "lemma4", {"C": C, "epsilon": epsilon})


def make_random_submodular_lattice(n, C, seed, integer=True):
    """Random submodular function: unary terms plus pairwise 2-D tables with nonpositive cross differences."""
    dom = IntLattice(n, C)
    if dom.size > enum_limit():
        raise DomainTooLargeError(f"(C+1)^n = {dom.size} exceeds the enumeration limit")
    rng = np.random.default_rng(seed)
    grid = np.zeros((C + 1,) * n)
    for i in range(n):
        h = rng.integers(0, 11, C + 1) if integer else rng.random(C + 1) * 10
        shape = [1] * n
        shape[i] = C + 1
        grid = grid + h.reshape(shape)
    for i in range(n):
        for j in range(i + 1, n):
            if integer:
                m = rng.integers(0, 4, (C, C)) * (rng.random((C, C)) < 0.6)
            else:
                m = rng.random((C, C)) * 3 * (rng.random((C, C)) < 0.6)
            g = np.zeros((C + 1, C + 1))
            g[1:, 1:] = -np.cumsum(np.cumsum(m, axis=0), axis=1)
            shape = [1] * n
            shape[i] = C + 1
            shape[j] = C + 1
            grid = grid + g.reshape(shape)
    grid = grid - grid.min()
    values = grid.ravel(order="F").tolist()
    return make_table_lattice(n, C, values, "random_submodular",
                              {"n": n, "C": C, "seed": seed, "integer": integer})


# --- families valid on any domain -------------------------------------------


def make_cardinality_oracle(domain):
    """``f(S) = |S|`` on ideals, ``f(x) = sum(x)`` on lattice points."""
    if isinstance(domain, IntLattice):
        return ValueOracle(domain, lambda x: float(sum(x)), "cardinality")
    return ValueOracle(domain, lambda s: float(bin(s).count("1")), "cardinality")


def make_constant_oracle(domain, value=1.0):
    return ValueOracle(domain, lambda _: float(value), "constant", {"value": value})


# --- distributive-lattice families ------------------------------------------


def make_table_dl(poset, values, family="table", params=None):
    """Explicit table keyed by ideal mask (``values`` maps mask -> value) covering every ideal."""
    values = {int(k): float(v) for k, v in values.items()}
    masks = ideal_masks(poset)
    missing = [int(s) for s in masks if int(s) not in values]
    if missing:
        raise DomainError(f"table misses {len(missing)} ideals, e.g. {bits(missing[0])}")
    extra = set(values) - {int(s) for s in masks}
    if extra:
        raise DomainError(f"table has non-ideal keys, e.g. {bits(min(extra))}")
    if values and min(values.values()) < 0:
        raise DomainError("table values must be nonnegative")
    p = {"values": values} if params is None else params
    return ValueOracle(DistributiveLattice(poset), values.__getitem__, family, p, table=values)


def dr_monotone_dl(poset, weights, increments=(), cover_sets=None, item_weights=None,
                   family="dr_monotone_dl", params=None, offset=0.0):
    """``f(S) = offset + sum(w_e) + phi(|S|) + weight of the union of the cover sets of S``.

    ``phi(t)`` is the sum of the first ``t`` entries of ``increments``.  The
    result is DR when weights are non-increasing along the order, increments
    are non-increasing and cover sets shrink along the order; it is also
    monotone when weights and increments are nonnegative.
    """
    m = poset.m
    weights = [float(w) for w in weights]
    if len(weights) != m:
        raise DomainError("one weight per element required")
    phi = [0.0]
    for d in list(increments)[:m]:
        phi.append(phi[-1] + float(d))
    while len(phi) <= m:
        phi.append(phi[-1])
    covers = list(cover_sets) if cover_sets is not None else [0] * m
    item_w = list(item_weights or [])
    memo = {}

    def f(s):
        v = memo.get(s)
        if v is not None:
            return v
        total = offset
        cov = 0
        cnt = 0
        rest = s
        while rest:
            low = rest & -rest
            e = low.bit_length() - 1
            total += weights[e]
            cov |= covers[e]
            cnt += 1
            rest ^= low
        total += phi[cnt]
        if cov:
            total += sum(item_w[u] for u in bits(cov))
        memo[s] = total
        return total

    if params is None:
        params = {"weights": weights, "increments": list(increments)}
    return ValueOracle(DistributiveLattice(poset), f, family, params)


def make_random_dr_monotone_dl(poset, seed, coverage=True, universe=8, monotone=True):
    """Random DR function on the ideals of ``poset`` (see :func:`dr_monotone_dl`).

    With ``monotone=False`` element weights and cardinality increments may be
    negative; a constant offset keeps every value nonnegative.
    """
    rng = random.Random(seed)
    order = linear_extension(poset).order
    m = poset.m
    lo = 0 if monotone else -8
    w = [0] * m
    for e in order:
        preds = bits(poset.strict_below[e])
        cap = min((w[d] for d in preds), default=10)
        w[e] = rng.randint(min(lo, cap), cap)
    incs = sorted((rng.randint(lo, 6) for _ in range(m)), reverse=True)
    phi_min = min(0, min((sum(incs[:t]) for t in range(m + 1)), default=0))
    offset = float(sum(-x for x in w if x < 0) - phi_min)
    cover_sets = None
    item_w = None
    if coverage:
        full = (1 << universe) - 1
        cover_sets = [0] * m
        for e in order:
            base = full
            for d in bits(poset.strict_below[e]):
                base &= cover_sets[d]
            cover_sets[e] = base & rng.getrandbits(universe)
        item_w = [rng.randint(1, 3) for _ in range(universe)]
    params = {"seed": seed, "coverage": coverage, "universe": universe}
    if not monotone:
        params["monotone"] = False
    return dr_monotone_dl(poset, w, incs, cover_sets, item_w, family="random_dr_dl",
                          params=params, offset=offset)


def on_chains(oracle):
    """Re-express an integer-lattice oracle on the ideals of ``n`` disjoint ``C``-chains."""
    if not isinstance(oracle.domain, IntLattice):
        raise DomainError("on_chains expects an integer-lattice oracle")
    n, C = oracle.domain.n, oracle.domain.C
    poset = Poset.chains(n, C)
    func = oracle._func

    def f(s):
        return func(chain_mask_to_point(s, n, C))

    return ValueOracle(DistributiveLattice(poset), f, oracle.family, oracle.params)


LATTICE_FAMILIES = {
    "fig3": lambda p: make_fig3(p.get("epsilon", 0.1)),
    "fig4": lambda p: make_fig4(p.get("x", 1.0)),
    "lemma4": lambda p: make_lemma4_counterexample(p["C"], p.get("epsilon", 0.1)),
    "random_submodular": lambda p: make_random_submodular_lattice(
        p["n"], p["C"], p["seed"], p.get("integer", True)),
}
