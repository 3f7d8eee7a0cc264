"""Down-closed constraints on ideals: cardinality, 0/1 knapsack, poset matroids."""
from dataclasses import dataclass, field

import numpy as np

from ._common import DomainError
from .lattice import Poset, bits, ideal_masks, mask_of


def _popcount(masks):
    return np.bitwise_count(masks.astype(np.uint64)) if masks.dtype != object else \
        np.array([bin(int(s)).count("1") for s in masks])


@dataclass(frozen=True)
class Cardinality:
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("cardinality bound must be nonnegative")

    def feasible(self, mask):
        return bin(mask).count("1") <= self.k

    def feasible_many(self, masks):
        return _popcount(masks) <= self.k

    def describe(self):
        return f"cardinality<={self.k}"

    def to_dict(self):
        return {"type": "cardinality", "k": self.k}


@dataclass(frozen=True)
class Knapsack:
    weights: tuple
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if any(w < 0 for w in self.weights):
            raise DomainError("knapsack weights must be nonnegative")

    def weight(self, mask):
        return sum(self.weights[e] for e in bits(mask))

    def feasible(self, mask):
        return self.weight(mask) <= self.budget

    def feasible_many(self, masks):
        if masks.dtype == object:
            return np.array([self.feasible(int(s)) for s in masks], dtype=bool)
        total = np.zeros(len(masks))
        for e, w in enumerate(self.weights):
            if w:
                total += ((masks >> e) & 1) * w
        return total <= self.budget

    def describe(self):
        return f"knapsack<={self.budget:g}"

    def to_dict(self):
        ws = [int(w) if float(w).is_integer() else w for w in self.weights]
        b = int(self.budget) if float(self.budget).is_integer() else self.budget
        return {"type": "knapsack", "weights": ws, "budget": b}


@dataclass(eq=False)
class PosetMatroid:
    """Independence system on the ideals of ``poset``.

    ``kind`` is ``"uniform"`` (ideals of size <= k), ``"family"`` (explicit list
    of independent ideals) or ``"custom"`` (``oracle(mask) -> bool``).  Axioms
    are verified by :func:`latmax.properties.check_poset_matroid`, not here.
    """

    poset: Poset
    kind: str
    k: int = None
    family: frozenset = None
    oracle: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "uniform":
            if self.k is None or self.k < 0:
                raise DomainError("uniform poset matroid needs k >= 0")
        elif self.kind == "family":
            fam = frozenset(int(s) for s in self.family)
            for s in fam:
                if not self.poset.is_ideal_mask(s):
                    raise DomainError(f"family member {bits(s)} is not an ideal")
            self.family = fam
        elif self.kind == "custom":
            if self.oracle is None:
                raise DomainError("custom poset matroid needs an independence oracle")
        else:
            raise DomainError(f"unknown matroid kind {self.kind!r}")

    @classmethod
    def uniform(cls, poset, k):
        return cls(poset, "uniform", k=k)

    @classmethod
    def from_family(cls, poset, sets):
        return cls(poset, "family", family=frozenset(mask_of(s) for s in sets))

    @classmethod
    def from_dict(cls, poset, d):
        kind = d.get("kind")
        if kind == "uniform":
            return cls.uniform(poset, int(d["k"]))
        if kind == "family":
            return cls.from_family(poset, d["independent"])
        raise DomainError(f"unknown matroid kind {kind!r}")

    def independent(self, mask):
        if self.kind == "uniform":
            return bin(mask).count("1") <= self.k
        if self.kind == "family":
            return mask in self.family
        return bool(self.oracle(mask))

    def feasible(self, mask):
        return self.independent(mask)

    def feasible_many(self, masks):
        if self.kind == "uniform":
            return _popcount(masks) <= self.k
        return np.fromiter((self.independent(int(s)) for s in masks), dtype=bool, count=len(masks))

    def independent_masks(self, limit=None):
        return ideal_masks(self.poset, limit, feasible=self.feasible_many)

    def describe(self):
        if self.kind == "uniform":
            return f"uniform-matroid k={self.k}"
        if self.kind == "family":
            return f"family-matroid |F|={len(self.family)}"
        return "custom-matroid"

    def to_dict(self):
        if self.kind == "uniform":
            return {"kind": "uniform", "k": self.k}
        if self.kind == "family":
            return {"kind": "family", "independent": [bits(s) for s in sorted(self.family)]}
        raise DomainError("custom matroids are not serializable")


@dataclass(eq=False)
class MatroidIntersection:
    """Joint independence in every one of several poset matroids on one poset."""

    matroids: tuple

    def __post_init__(self):
        self.matroids = tuple(self.matroids)
        if not self.matroids:
            raise DomainError("need at least one matroid")
        p = self.matroids[0].poset
        if any(mt.poset != p for mt in self.matroids):
            raise DomainError("all matroids must share one poset")

    @property
    def poset(self):
        return self.matroids[0].poset

    def independent(self, mask):
        return all(mt.independent(mask) for mt in self.matroids)

    feasible = independent

    def feasible_many(self, masks):
        ok = np.ones(len(masks), dtype=bool)
        for mt in self.matroids:
            ok &= mt.feasible_many(masks)
        return ok

    def describe(self):
        return " & ".join(mt.describe() for mt in self.matroids)


def _forest(edge_ends, chosen):
    parent = {}

    def find(v):
        while parent.get(v, v) != v:
            v = parent[v]
        return v

    for e in chosen:
        u, v = edge_ends[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def graphic_poset_family(poset, edge_ends):
    """Independent ideals of the graphic matroid of a multigraph whose edges are the poset elements."""
    return PosetMatroid(poset, "family", family=frozenset(
        int(s) for s in ideal_masks(poset) if _forest(edge_ends, bits(int(s)))))


def fig2_family():
    """Two pairs of parallel edges a-b (e1, e2) and b-c (e3, e4) with e1 < e3, e2 < e4.

    The independent ideals are closed under subsets but violate exchange.
    Element ids 0..3 are e1..e4.
    """
    poset = Poset(4, [(0, 2), (1, 3)], labels=["e1", "e2", "e3", "e4"])
    ends = [("a", "b"), ("a", "b"), ("b", "c"), ("b", "c")]
    return graphic_poset_family(poset, ends)


def constraint_from_dict(poset, d):
    if d is None:
        return None
    t = d.get("type")
    if t == "cardinality":
        return Cardinality(int(d["k"]))
    if t == "knapsack":
        return Knapsack(tuple(d["weights"]), d["budget"])
    if t == "matroid":
        return PosetMatroid.from_dict(poset, d)
    if t is None and "kind" in d:
        return PosetMatroid.from_dict(poset, d)
    raise DomainError(f"unknown constraint type {t!r}")


def constraint_to_dict(c):
    if c is None:
        return None
    if isinstance(c, PosetMatroid):
        return {"type": "matroid", **c.to_dict()}
    return c.to_dict()
