"""Densest k-subhypergraph to knapsack-constrained DR maximization on a distributive lattice.

Each vertex becomes a minimal element of weight 1; each hyperedge gets ``k``
copies of weight 0 sitting above its vertices.  With ``f(S) = |S|`` and
budget ``k`` the optimum is ``k * (1 + R)`` where ``R`` is the densest
k-subhypergraph value.
"""
import itertools
import json
import math
import random
from dataclasses import dataclass

from ._common import DomainError, DomainTooLargeError, enum_limit
from .constraints import Knapsack
from .lattice import DistributiveLattice, Ideal, Poset, bits
from .oracles import make_cardinality_oracle


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(tuple(sorted(set(int(v) for v in e))) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 0:
            raise DomainError("vertex count must be nonnegative")
        for e in edges:
            if not e:
                raise DomainError("hyperedges must be nonempty")
            if e[0] < 0 or e[-1] >= self.n:
                raise DomainError(f"hyperedge {list(e)} references a vertex outside 0..{self.n - 1}")

    @property
    def m(self):
        return len(self.edges)

    def induced(self, vertices):
        vs = set(vertices)
        return [j for j, e in enumerate(self.edges) if vs.issuperset(e)]

    def to_dict(self):
        return {"vertices": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["vertices"]), tuple(tuple(e) for e in d["edges"]))


def load_hypergraph(path):
    with open(path) as fh:
        return Hypergraph.from_dict(json.load(fh))


def save_hypergraph(path, h):
    with open(path, "w") as fh:
        json.dump(h.to_dict(), fh)
        fh.write("\n")


def random_hypergraph(n, m, seed, edge_sizes=(2, 3), balanced=False):
    """Seeded random hypergraph with distinct edges where possible; ``balanced`` forces ``m = n``."""
    if balanced:
        m = n
    rng = random.Random(seed)
    sizes = [s for s in edge_sizes if 1 <= s <= n]
    if m and not sizes:
        raise DomainError("no admissible edge size for this vertex count")
    edges = []
    seen = set()
    for _ in range(m):
        for _attempt in range(20):
            e = tuple(sorted(rng.sample(range(n), rng.choice(sizes))))
            if e not in seen:
                break
        seen.add(e)
        edges.append(e)
    return Hypergraph(n, tuple(edges))


@dataclass
class ReducedInstance:
    hypergraph: Hypergraph
    k: int
    poset: Poset
    oracle: object
    knapsack: Knapsack

    def element(self, e):
        """``("vertex", v)`` or ``("edge", edge_index, copy)`` with copies numbered from 1."""
        n = self.hypergraph.n
        if e < n:
            return ("vertex", e)
        j, i = divmod(e - n, self.k)
        return ("edge", j, i + 1)

    def copy_id(self, edge, copy):
        return self.hypergraph.n + edge * self.k + (copy - 1)

    def edge_mask(self, edge):
        lo = self.copy_id(edge, 1)
        return ((1 << self.k) - 1) << lo


def reduce_dksh(h, k):
    """Build the knapsack-constrained instance for ``(h, k)``; elements are ``n + k*m``."""
    if not 1 <= k <= h.n:
        raise DomainError(f"k must lie in 1..{h.n}")
    n = h.n
    covers = []
    labels = [f"v{v}" for v in range(n)]
    for j, e in enumerate(h.edges):
        for i in range(k):
            cid = n + j * k + i
            covers.extend((v, cid) for v in e)
            labels.append(f"e{j}.{i + 1}")
    poset = Poset(n + k * h.m, covers, labels)
    oracle = make_cardinality_oracle(DistributiveLattice(poset))
    weights = [1] * n + [0] * (k * h.m)
    return ReducedInstance(h, k, poset, oracle, Knapsack(tuple(weights), k))


def normalized_ideal(inst, vertices):
    """Ideal holding ``vertices`` and every copy of every edge they induce."""
    mask = 0
    for v in vertices:
        mask |= 1 << v
    for j in inst.hypergraph.induced(vertices):
        mask |= inst.edge_mask(j)
    return Ideal(inst.poset, mask)


def _pad(vertices, n, k):
    vs = sorted(set(vertices))
    for v in range(n):
        if len(vs) >= k:
            break
        if v not in vs:
            vs.append(v)
    return tuple(sorted(vs))


def extract_dksh_solution(inst, s):
    """Vertex set of size ``k`` and its induced edge count from a feasible ideal ``s``.

    ``S ∩ V`` is padded with the lowest-id missing vertices.  When no edge is
    induced but some edge has at most ``k`` vertices, the vertices of the
    smallest such edge (padded the same way) are returned instead.
    """
    mask = s.mask if isinstance(s, Ideal) else int(s)
    if not inst.poset.is_ideal_mask(mask):
        raise DomainError("solution is not an ideal of the reduced poset")
    if not inst.knapsack.feasible(mask):
        raise DomainError("solution violates the knapsack budget")
    h, k = inst.hypergraph, inst.k
    vs = _pad([e for e in bits(mask) if e < h.n], h.n, k)
    beta = len(h.induced(vs))
    if beta == 0:
        small = [e for e in h.edges if len(e) <= k]
        if small:
            vs = _pad(min(small, key=len), h.n, k)
            beta = len(h.induced(vs))
    return vs, beta


def dksh_brute_force(h, k, limit=None):
    """Exact densest k-subhypergraph: ``(vertices, R)``, first maximizer in lexicographic order."""
    if not 0 <= k <= h.n:
        raise DomainError(f"k must lie in 0..{h.n}")
    lim = enum_limit(limit)
    total = math.comb(h.n, k)
    if total > lim:
        raise DomainTooLargeError(f"C({h.n},{k}) = {total} subsets exceed the limit {lim}")
    best, best_r = None, -1
    for vs in itertools.combinations(range(h.n), k):
        r = len(h.induced(vs))
        if r > best_r:
            best, best_r = vs, r
    return best, best_r


def ratio_transfer(alpha_value, n_prime, m_prime, c=1):
    """DkSH ratio ``(1 + 1/c) * alpha`` implied by an ``alpha``-approximation on the reduced instance.

    ``alpha_value`` may be a number or a function of the reduced element
    count, which is then evaluated at ``n'(m'+1)``.
    """
    if callable(alpha_value):
        alpha_value = alpha_value(n_prime * (m_prime + 1))
    if alpha_value < 1:
        raise DomainError("alpha must be at least 1")
    if c < 1:
        raise DomainError("c must be at least 1")
    return (1 + 1 / c) * alpha_value


def corollary_factor(n, delta):
    """``2 ** ((log2(sqrt(n) - 1)) ** delta - 1)``, the inapproximability factor for ``n`` elements."""
    base = math.sqrt(n) - 1
    if base < 1:
        raise DomainError("factor is defined for n >= 4")
    return 2 ** (math.log2(base) ** delta - 1)
