"""Posets, ideals, bounded integer lattices and the correspondence between them.

Ideals and reachability sets are plain Python ints used as bitmasks: bit ``e``
is set iff element ``e`` belongs to the set.  Bulk enumeration goes through
numpy arrays of masks.
"""
import heapq
import itertools
import random
from dataclasses import dataclass

import numpy as np

from ._common import DomainError, DomainTooLargeError, enum_limit


def bits(mask):
    """Element ids contained in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(elements):
    m = 0
    for e in elements:
        m |= 1 << e
    return m


class Poset:
    """Finite poset on ids ``0..m-1`` given by cover relations ``(lower, upper)``.

    The reflexive-transitive closure is computed once; ``below[e]`` and
    ``above[e]`` are masks that include ``e`` itself.
    """

    def __init__(self, m, covers=(), labels=None):
        m = int(m)
        if m < 0:
            raise DomainError("element count must be nonnegative")
        covers = [(int(lo), int(up)) for lo, up in covers]
        for lo, up in covers:
            if not (0 <= lo < m and 0 <= up < m):
                raise DomainError(f"cover ({lo}, {up}) references an id outside 0..{m - 1}")
            if lo == up:
                raise DomainError(f"cover ({lo}, {up}) is a self loop")
        if labels is not None:
            labels = [str(s) for s in labels]
            if len(labels) != m:
                raise DomainError("labels must name every element")
        self.m = m
        self.covers = tuple(sorted(set(covers)))
        self.labels = tuple(labels) if labels is not None else None
        self.chain_shape = None

        succ = [[] for _ in range(m)]
        indeg = [0] * m
        for lo, up in self.covers:
            succ[lo].append(up)
            indeg[up] += 1
        # Kahn with a heap so the stored topological order is canonical
        heap = [e for e in range(m) if indeg[e] == 0]
        heapq.heapify(heap)
        topo = []
        while heap:
            e = heapq.heappop(heap)
            topo.append(e)
            for f in succ[e]:
                indeg[f] -= 1
                if indeg[f] == 0:
                    heapq.heappush(heap, f)
        if len(topo) != m:
            raise DomainError("cover relations contain a cycle")
        self.topo_order = tuple(topo)

        below = [1 << e for e in range(m)]
        for e in topo:
            for f in succ[e]:
                below[f] |= below[e]
        above = [1 << e for e in range(m)]
        for e in reversed(topo):
            for f in succ[e]:
                above[e] |= above[f]
        self.below = tuple(below)
        self.above = tuple(above)
        self.strict_below = tuple(below[e] & ~(1 << e) for e in range(m))
        self.strict_above = tuple(above[e] & ~(1 << e) for e in range(m))
        self.full_mask = (1 << m) - 1

        # Hasse upper covers: minimal elements of the strict up-set
        ucov = []
        for e in range(m):
            ups = self.strict_above[e]
            ucov.append(tuple(f for f in bits(ups) if self.strict_below[f] & ups == 0))
        self.upper_covers = tuple(ucov)

    # constructors -------------------------------------------------------

    @classmethod
    def chain(cls, m):
        return cls(m, [(e, e + 1) for e in range(m - 1)])

    @classmethod
    def antichain(cls, m):
        return cls(m, [])

    @classmethod
    def chains(cls, n, C):
        """``n`` disjoint chains of length ``C``; chain ``i`` level ``j`` (1-based) has id ``i*C + j - 1``."""
        covers = [(i * C + j, i * C + j + 1) for i in range(n) for j in range(C - 1)]
        p = cls(n * C, covers)
        p.chain_shape = (n, C)
        return p

    @classmethod
    def from_dict(cls, d):
        return cls(d["elements"], d.get("covers", []), d.get("labels"))

    def to_dict(self):
        d = {"elements": self.m, "covers": [list(c) for c in self.covers]}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    # queries ------------------------------------------------------------

    def leq(self, e, f):
        return bool(self.below[f] >> e & 1)

    def label(self, e):
        return self.labels[e] if self.labels is not None else str(e)

    def check_ids(self, elements):
        for e in elements:
            if not (0 <= e < self.m):
                raise DomainError(f"element id {e} outside 0..{self.m - 1}")

    def is_ideal_mask(self, mask):
        if mask < 0 or mask > self.full_mask:
            return False
        sb = self.strict_below
        rest = mask
        while rest:
            low = rest & -rest
            e = low.bit_length() - 1
            if sb[e] & ~mask:
                return False
            rest ^= low
        return True

    def maximal_in(self, mask):
        """Elements of ``mask`` with nothing above them inside ``mask``."""
        return [e for e in bits(mask) if self.strict_above[e] & mask == 0]

    def __eq__(self, other):
        return isinstance(other, Poset) and self.m == other.m and self.below == other.below

    def __hash__(self):
        return hash((self.m, self.below))

    def __repr__(self):
        return f"Poset(m={self.m}, covers={len(self.covers)})"


@dataclass(frozen=True)
class Ideal:
    """Downward-closed subset of a poset (a point of the distributive lattice)."""

    poset: Poset
    mask: int

    def __post_init__(self):
        if not self.poset.is_ideal_mask(self.mask):
            raise DomainError(f"mask {self.mask:#x} is not an ideal of {self.poset!r}")

    @classmethod
    def of(cls, poset, elements):
        elements = list(elements)
        poset.check_ids(elements)
        return cls(poset, mask_of(elements))

    @classmethod
    def empty(cls, poset):
        return cls(poset, 0)

    @classmethod
    def full(cls, poset):
        return cls(poset, poset.full_mask)

    def elements(self):
        return tuple(bits(self.mask))

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, e):
        return bool(self.mask >> e & 1)

    def __iter__(self):
        return iter(bits(self.mask))

    def __repr__(self):
        return f"Ideal({list(self.elements())})"


@dataclass(frozen=True)
class LinearExtension:
    poset: Poset
    order: tuple

    def __post_init__(self):
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(self.poset.m)):
            raise DomainError("linear extension must list every element exactly once")
        pos = self.positions()
        for lo, up in self.poset.covers:
            if pos[lo] > pos[up]:
                raise DomainError(f"order places {up} before {lo}")

    def positions(self):
        pos = [0] * len(self.order)
        for i, e in enumerate(self.order):
            pos[e] = i
        return pos


@dataclass(frozen=True)
class IntLattice:
    """The bounded integer lattice ``{0..C}^n``."""

    n: int
    C: int

    def __post_init__(self):
        if self.n < 1 or self.C < 1:
            raise DomainError("integer lattice needs n >= 1 and C >= 1")

    @property
    def size(self):
        return (self.C + 1) ** self.n

    def contains(self, x):
        return len(x) == self.n and all(isinstance(v, (int, np.integer)) and 0 <= v <= self.C for v in x)

    def check(self, x):
        x = tuple(int(v) for v in x)
        if not self.contains(x):
            raise DomainError(f"{x} is not a point of [0..{self.C}]^{self.n}")
        return x

    def index(self, x):
        """Mixed-radix index with ``x[0]`` least significant."""
        idx = 0
        for v in reversed(x):
            idx = idx * (self.C + 1) + v
        return idx

    def points(self):
        """All points in mixed-radix order (first coordinate varies fastest)."""
        for p in itertools.product(range(self.C + 1), repeat=self.n):
            yield p[::-1]

    def bottom(self):
        return (0,) * self.n

    def top(self):
        return (self.C,) * self.n

    def to_dict(self):
        return {"type": "int_lattice", "n": self.n, "C": self.C}


@dataclass(frozen=True)
class DistributiveLattice:
    """The lattice of ideals of ``poset``."""

    poset: Poset

    def contains(self, x):
        if isinstance(x, Ideal):
            return x.poset == self.poset
        return isinstance(x, (int, np.integer)) and self.poset.is_ideal_mask(int(x))

    def check(self, x):
        if isinstance(x, Ideal):
            if x.poset != self.poset:
                raise DomainError("ideal belongs to a different poset")
            return x.mask
        if isinstance(x, (int, np.integer)) and self.poset.is_ideal_mask(int(x)):
            return int(x)
        raise DomainError(f"{x!r} is not an ideal of {self.poset!r}")

    def to_dict(self):
        return {"type": "dl", "poset": self.poset.to_dict()}


def meet_join(a, b):
    """Return ``(a ∧ b, a ∨ b)`` for two points of the same lattice.

    Integer-lattice points are tuples (entrywise min/max); ideals use
    intersection/union.
    """
    if isinstance(a, Ideal) or isinstance(b, Ideal):
        if not (isinstance(a, Ideal) and isinstance(b, Ideal)) or a.poset != b.poset:
            raise DomainError("meet/join of ideals requires the same poset")
        return Ideal(a.poset, a.mask & b.mask), Ideal(a.poset, a.mask | b.mask)
    a = tuple(a)
    b = tuple(b)
    if len(a) != len(b):
        raise DomainError("meet/join requires points of equal dimension")
    return tuple(map(min, a, b)), tuple(map(max, a, b))


def is_ideal(poset, s):
    """True iff the element set ``s`` is downward closed in ``poset``."""
    if isinstance(s, Ideal):
        return s.poset == poset
    s = list(s)
    poset.check_ids(s)
    return poset.is_ideal_mask(mask_of(s))


def linear_extension(poset, tie_break="id", seed=None):
    """A linear extension; among available elements pick lowest id or a seeded random priority."""
    if tie_break == "id":
        prio = list(range(poset.m))
    elif tie_break == "seeded":
        prio = list(range(poset.m))
        random.Random(seed).shuffle(prio)
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    indeg = [0] * poset.m
    succ = [[] for _ in range(poset.m)]
    for lo, up in poset.covers:
        succ[lo].append(up)
        indeg[up] += 1
    heap = [(prio[e], e) for e in range(poset.m) if indeg[e] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, e = heapq.heappop(heap)
        order.append(e)
        for f in succ[e]:
            indeg[f] -= 1
            if indeg[f] == 0:
                heapq.heappush(heap, (prio[f], f))
    return LinearExtension(poset, tuple(order))


def _mask_dtype(poset):
    return np.int64 if poset.m <= 62 else object


def ideal_masks(poset, limit=None, feasible=None):
    """Sorted array of all ideal masks (optionally only those passing ``feasible``).

    ``feasible`` maps an array of masks to a boolean array and must be
    down-closed on ideals (cardinality, knapsack and matroid constraints are);
    infeasible ideals are pruned as soon as they appear.
    """
    limit = enum_limit(limit)
    dt = _mask_dtype(poset)
    masks = np.zeros(1, dtype=dt)
    if feasible is not None and not bool(np.asarray(feasible(masks))[0]):
        return masks[:0]
    for e in linear_extension(poset).order:
        need = poset.strict_below[e]
        bit = 1 << e
        if dt is object:
            ok = np.array([(int(s) & need) == need for s in masks], dtype=bool)
        else:
            ok = (masks & need) == need
        new = masks[ok] | bit if dt is not object else np.array([int(s) | bit for s in masks[ok]], dtype=object)
        if feasible is not None and len(new):
            new = new[np.asarray(feasible(new), dtype=bool)]
        if len(masks) + len(new) > limit:
            raise DomainTooLargeError(
                f"ideal enumeration exceeds the limit of {limit} (already {len(masks) + len(new)} ideals)")
        masks = np.concatenate([masks, new])
    masks.sort()
    return masks


def enumerate_ideals(poset, limit=None):
    """Yield every ideal exactly once, in ascending mask order."""
    for s in ideal_masks(poset, limit):
        yield Ideal(poset, int(s))


def count_ideals(poset, limit=None):
    return len(ideal_masks(poset, limit))


def lattice_point_to_ideal(x, C):
    """Map ``x`` in ``[0..C]^n`` to the ideal of ``n`` disjoint ``C``-chains holding the lowest ``x_i`` of chain ``i``."""
    x = IntLattice(len(x), C).check(x)
    poset = Poset.chains(len(x), C)
    mask = 0
    for i, v in enumerate(x):
        mask |= ((1 << v) - 1) << (i * C)
    return Ideal(poset, mask)


def ideal_to_lattice_point(ideal, shape=None):
    """Inverse of :func:`lattice_point_to_ideal`; the poset must be ``n`` disjoint ``C``-chains."""
    shape = shape or ideal.poset.chain_shape
    if shape is None or ideal.poset != Poset.chains(*shape):
        raise DomainError("poset is not a union of disjoint chains in canonical layout")
    n, C = shape
    chunk = (1 << C) - 1
    return tuple(bin(ideal.mask >> (i * C) & chunk).count("1") for i in range(n))


def chain_mask_to_point(mask, n, C):
    chunk = (1 << C) - 1
    return tuple(bin(mask >> (i * C) & chunk).count("1") for i in range(n))


def random_poset(m, seed, density=0.3):
    """Random poset on ``m`` elements: each pair ``i < j`` becomes a cover ``i -> j`` with probability ``density``."""
    rng = random.Random(seed)
    covers = [(i, j) for j in range(m) for i in range(j) if rng.random() < density]
    return Poset(m, covers)
