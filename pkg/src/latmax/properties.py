"""Exhaustive checkers for submodularity, DR, concavity, monotonicity and poset-matroid axioms.

Every checker returns a :class:`PropertyReport`.  A failing report carries a
witness dict (``kind`` plus the exact points/sets and values) that
:func:`verify_witness` re-evaluates through the oracle.

Lattice checks work on the full value table.  Submodularity is checked on
unit squares by default (equivalent to the pairwise definition); DR on a
distributive lattice is checked on two local moves, unit squares and chain
steps ``(S, x) -> (S + x, z)`` for ``z`` covering ``x``, which generate the
order on admissible pairs and so are equivalent to the definition.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._common import TAU, DomainError, DomainTooLargeError, enum_limit
from .lattice import IntLattice, bits, ideal_masks


@dataclass
class PropertyReport:
    property: str
    holds: bool
    witness: dict = None
    checks_performed: int = 0
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        d = {"property": self.property, "holds": self.holds,
             "checks_performed": self.checks_performed, "witness": _jsonable(self.witness)}
        if self.notes:
            d["notes"] = self.notes
        return d


def _jsonable(w):
    if w is None:
        return None
    out = {}
    for k, v in w.items():
        if isinstance(v, Fraction):
            v = float(v)
        elif isinstance(v, (np.floating,)):
            v = float(v)
        elif isinstance(v, tuple):
            v = [int(t) for t in v]
        out[k] = v
    return out


def _tau(exact):
    return 0 if exact else TAU


def _val(v, exact):
    return Fraction(v) if exact else float(v)


# --- integer lattice ------------------------------------------------------------


def _lattice_grid(oracle, exact, limit=None):
    dom = oracle.domain
    if not isinstance(dom, IntLattice):
        raise DomainError("expected an integer-lattice oracle")
    lim = enum_limit(limit)
    if dom.size > lim:
        raise DomainTooLargeError(f"(C+1)^n = {dom.size} exceeds the limit {lim}")
    vals = [_val(oracle.raw(p), exact) for p in dom.points()]
    arr = np.array(vals, dtype=object if exact else float)
    return arr.reshape((dom.C + 1,) * dom.n, order="F")


def _sl(n, axes):
    s = [slice(None)] * n
    for ax, sl in axes.items():
        s[ax] = sl
    return tuple(s)


def _first(mask):
    idx = np.argwhere(mask)
    return tuple(int(v) for v in idx[0]) if len(idx) else None


def _unit(n, i):
    return tuple(1 if t == i else 0 for t in range(n))


def _add(x, *vs):
    out = list(x)
    for v in vs:
        out = [a + b for a, b in zip(out, v)]
    return tuple(out)


def _square_scan(grid, n, tau):
    """First failing unit square ``f(x+e_i) + f(x+e_j) >= f(x) + f(x+e_i+e_j)``."""
    checks = 0
    for i in range(n):
        for j in range(i + 1, n):
            lo, hi = slice(0, -1), slice(1, None)
            f00 = grid[_sl(n, {i: lo, j: lo})]
            f10 = grid[_sl(n, {i: hi, j: lo})]
            f01 = grid[_sl(n, {i: lo, j: hi})]
            f11 = grid[_sl(n, {i: hi, j: hi})]
            slack = f10 + f01 - f00 - f11
            checks += slack.size
            bad = _first(slack < -tau)
            if bad is not None:
                x = bad
                ei, ej = _unit(n, i), _unit(n, j)
                w = {"kind": "square", "x": _add(x, ei), "y": _add(x, ej),
                     "meet": x, "join": _add(x, ei, ej),
                     "f_x": grid[_add(x, ei)], "f_y": grid[_add(x, ej)],
                     "f_meet": grid[x], "f_join": grid[_add(x, ei, ej)]}
                return w, checks
    return None, checks


def _pairwise_scan(grid, dom, tau):
    pts = list(dom.points())
    checks = 0
    for a in range(len(pts)):
        x = pts[a]
        for b in range(a + 1, len(pts)):
            y = pts[b]
            meet = tuple(map(min, x, y))
            join = tuple(map(max, x, y))
            checks += 1
            if grid[x] + grid[y] - grid[meet] - grid[join] < -tau:
                return {"kind": "square", "x": x, "y": y, "meet": meet, "join": join,
                        "f_x": grid[x], "f_y": grid[y], "f_meet": grid[meet],
                        "f_join": grid[join]}, checks
    return None, checks


def check_submodular(oracle, mode="local", exact=False, limit=None):
    """``f(x) + f(y) >= f(x ∨ y) + f(x ∧ y)`` over ``[0..C]^n``.

    ``mode="local"`` scans unit squares, ``mode="pairwise"`` all unordered pairs.
    """
    grid = _lattice_grid(oracle, exact, limit)
    dom = oracle.domain
    tau = _tau(exact)
    if mode == "local":
        w, checks = _square_scan(grid, dom.n, tau)
    elif mode == "pairwise":
        w, checks = _pairwise_scan(grid, dom, tau)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PropertyReport("submodular", w is None, w, checks)


def _concavity_scan(grid, n, tau):
    checks = 0
    for i in range(n):
        if grid.shape[i] < 3:
            continue
        f0 = grid[_sl(n, {i: slice(0, -2)})]
        f1 = grid[_sl(n, {i: slice(1, -1)})]
        f2 = grid[_sl(n, {i: slice(2, None)})]
        slack = (f1 - f0) - (f2 - f1)
        checks += slack.size
        bad = _first(slack < -tau)
        if bad is not None:
            e = _unit(n, i)
            x = bad
            return {"kind": "concavity", "x": x, "i": i,
                    "f_x": grid[x], "f_x1": grid[_add(x, e)], "f_x2": grid[_add(x, e, e)]}, checks
    return None, checks


def _dr_definition_scan(grid, dom, tau):
    """``f(x + χ_i) - f(x) >= f(y + χ_i) - f(y)`` for every ``x <= y`` with ``y_i < C``."""
    n, C = dom.n, dom.C
    pts = list(dom.points())
    checks = 0
    for i in range(n):
        e = _unit(n, i)
        cand = [p for p in pts if p[i] < C]
        gains = {p: grid[_add(p, e)] - grid[p] for p in cand}
        for x in cand:
            gx = gains[x]
            for y in cand:
                if y == x or any(a > b for a, b in zip(x, y)):
                    continue
                checks += 1
                if gx - gains[y] < -tau:
                    return {"kind": "dr_pair", "x": x, "y": y, "i": i,
                            "gain_x": gx, "gain_y": gains[y]}, checks
    return None, checks


def check_dr_int_lattice(oracle, mode="characterization", exact=False, limit=None):
    """DR on ``[0..C]^n``.

    ``characterization``: submodular plus coordinate-wise concave.
    ``definition``: the diminishing-returns inequality over all ``x <= y``.
    """
    grid = _lattice_grid(oracle, exact, limit)
    dom = oracle.domain
    tau = _tau(exact)
    if mode == "characterization":
        w, c1 = _square_scan(grid, dom.n, tau)
        c2 = 0
        if w is None:
            w, c2 = _concavity_scan(grid, dom.n, tau)
        return PropertyReport("dr", w is None, w, c1 + c2, {"mode": mode})
    if mode == "definition":
        w, checks = _dr_definition_scan(grid, dom, tau)
        return PropertyReport("dr", w is None, w, checks, {"mode": mode})
    raise ValueError(f"unknown mode {mode!r}")


def check_coordinate_concave(oracle, exact=False, limit=None):
    grid = _lattice_grid(oracle, exact, limit)
    w, checks = _concavity_scan(grid, oracle.domain.n, _tau(exact))
    return PropertyReport("coordinate_concave", w is None, w, checks)


# --- distributive lattice ---------------------------------------------------------


class _IdealTable:
    """Sorted ideal masks with their values and constant-time-ish lookup."""

    def __init__(self, oracle, exact, limit=None):
        self.poset = oracle.domain.poset
        self.masks = ideal_masks(self.poset, limit)
        vals = [_val(oracle.raw(int(s)), exact) for s in self.masks]
        self.vals = np.array(vals, dtype=object if exact else float)
        m = self.poset.m
        self.member = [((self.masks >> e) & 1).astype(bool) for e in range(m)]
        self.admissible = []
        for e in range(m):
            need = self.poset.strict_below[e]
            self.admissible.append(((self.masks & need) == need) & ~self.member[e])

    def index(self, masks):
        return np.searchsorted(self.masks, masks)

    def value(self, mask):
        return self.vals[int(self.index(np.array([mask], dtype=self.masks.dtype))[0])]

    def gain(self, e, idx):
        """``f(S + e) - f(S)`` for ideal indices ``idx`` admissible for ``e``."""
        plus = self.index(self.masks[idx] | (1 << e))
        return self.vals[plus] - self.vals[idx]


def _dl_table(oracle, exact, limit):
    if isinstance(oracle.domain, IntLattice):
        raise DomainError("expected a distributive-lattice oracle")
    if oracle.domain.poset.m > 62:
        raise DomainTooLargeError("distributive-lattice checks support at most 62 elements")
    return _IdealTable(oracle, exact, limit)


def _dl_local_scan(tab, tau):
    poset = tab.poset
    m = poset.m
    checks = 0
    # unit squares: f(S+x) + f(S+z) >= f(S) + f(S+x+z)
    for x in range(m):
        for z in range(x + 1, m):
            idx = np.nonzero(tab.admissible[x] & tab.admissible[z])[0]
            if not len(idx):
                continue
            gx = tab.gain(x, idx)
            after = tab.index(tab.masks[idx] | (1 << z))
            gxz = tab.gain(x, after)
            checks += len(idx)
            bad = np.nonzero(gx - gxz < -tau)[0]
            if len(bad):
                s = int(tab.masks[idx[bad[0]]])
                return {"kind": "dl_pair", "S": bits(s), "x": x, "T": bits(s | 1 << z), "y": x,
                        "gain_S_x": gx[bad[0]], "gain_T_y": gxz[bad[0]]}, checks
    # chain steps: f(S+x) - f(S) >= f(S+x+z) - f(S+x) for z covering x
    for x in range(m):
        idx_x = np.nonzero(tab.admissible[x])[0]
        if not len(idx_x):
            continue
        plus = tab.index(tab.masks[idx_x] | (1 << x))
        for z in poset.upper_covers[x]:
            ok = tab.admissible[z][plus]
            if not ok.any():
                continue
            src = idx_x[ok]
            mid = plus[ok]
            gx = tab.vals[mid] - tab.vals[src]
            gz = tab.gain(z, mid)
            checks += len(src)
            bad = np.nonzero(gx - gz < -tau)[0]
            if len(bad):
                s = int(tab.masks[src[bad[0]]])
                return {"kind": "dl_pair", "S": bits(s), "x": x, "T": bits(s | 1 << x), "y": z,
                        "gain_S_x": gx[bad[0]], "gain_T_y": gz[bad[0]]}, checks
    return None, checks


def _dl_definition_scan(tab, tau):
    poset = tab.poset
    pairs = []
    for e in range(poset.m):
        idx = np.nonzero(tab.admissible[e])[0]
        g = tab.gain(e, idx)
        for t, s_idx in enumerate(idx):
            pairs.append((int(tab.masks[s_idx]), e, g[t]))
    if not pairs:
        return None, 0
    S = np.array([p[0] for p in pairs], dtype=tab.masks.dtype)
    E = np.array([p[1] for p in pairs])
    G = np.array([p[2] for p in pairs], dtype=tab.vals.dtype)
    below = np.array(poset.below, dtype=tab.masks.dtype)
    checks = 0
    for s, x, g in pairs:
        sel = ((S & s) == s) & (((below[E] >> x) & 1) == 1)
        checks += int(sel.sum())
        bad = np.nonzero(sel & (g - G < -tau))[0]
        if len(bad):
            b = bad[0]
            return {"kind": "dl_pair", "S": bits(s), "x": x, "T": bits(int(S[b])), "y": int(E[b]),
                    "gain_S_x": g, "gain_T_y": G[b]}, checks
    return None, checks


def check_dr_dl(oracle, mode="local", exact=False, limit=None):
    """DR on ``D(P)``: ``f(S+x) - f(S) >= f(T+y) - f(T)`` for ``S ⊆ T``, ``x ⪯ y``, ``S+x, T+y`` ideals.

    ``mode="definition"`` enumerates every such quadruple; ``mode="local"``
    checks the generating local moves only.
    """
    tab = _dl_table(oracle, exact, limit)
    tau = _tau(exact)
    if mode == "local":
        w, checks = _dl_local_scan(tab, tau)
    elif mode == "definition":
        w, checks = _dl_definition_scan(tab, tau)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PropertyReport("dr", w is None, w, checks, {"mode": mode})


def check_dr(oracle, **kw):
    if isinstance(oracle.domain, IntLattice):
        return check_dr_int_lattice(oracle, **{k: v for k, v in kw.items() if k != "mode"})
    return check_dr_dl(oracle, **kw)


def check_monotone(oracle, exact=False, limit=None):
    """``f`` is non-decreasing along every cover step of the domain lattice."""
    tau = _tau(exact)
    if isinstance(oracle.domain, IntLattice):
        grid = _lattice_grid(oracle, exact, limit)
        n = oracle.domain.n
        checks = 0
        for i in range(n):
            lo = grid[_sl(n, {i: slice(0, -1)})]
            hi = grid[_sl(n, {i: slice(1, None)})]
            checks += lo.size
            bad = _first(hi - lo < -tau)
            if bad is not None:
                up = _add(bad, _unit(n, i))
                return PropertyReport("monotone", False,
                                      {"kind": "monotone", "lower": bad, "upper": up,
                                       "f_lower": grid[bad], "f_upper": grid[up]}, checks)
        return PropertyReport("monotone", True, None, checks)
    tab = _dl_table(oracle, exact, limit)
    checks = 0
    for e in range(tab.poset.m):
        idx = np.nonzero(tab.admissible[e])[0]
        g = tab.gain(e, idx)
        checks += len(idx)
        bad = np.nonzero(g < -tau)[0]
        if len(bad):
            s = int(tab.masks[idx[bad[0]]])
            return PropertyReport("monotone", False,
                                  {"kind": "monotone", "lower": bits(s), "upper": bits(s | 1 << e),
                                   "f_lower": tab.vals[idx[bad[0]]],
                                   "f_upper": tab.vals[idx[bad[0]]] + g[bad[0]]}, checks)
    return PropertyReport("monotone", True, None, checks)


# --- poset matroids ---------------------------------------------------------------


def _family_masks(sets):
    return {s if isinstance(s, int) else sum(1 << e for e in s) for s in sets}


def _independence(independent):
    """Mask predicate for a PosetMatroid, a callable or an iterable of element sets."""
    if hasattr(independent, "independent"):
        return independent.independent
    if callable(independent):
        return independent
    return _family_masks(independent).__contains__


def check_poset_matroid(poset, independent, limit=None):
    """Verify nonemptiness, heredity (M1) and exchange (M2) of an independence family.

    ``independent`` is a :class:`~latmax.constraints.PosetMatroid`, a callable
    on masks, or an iterable of element sets.
    """
    masks = [int(s) for s in ideal_masks(poset, limit)]
    ideal_set = set(masks)
    if hasattr(independent, "independent") or callable(independent):
        ind = _independence(independent)
        fam = [s for s in masks if ind(s)]
    else:
        fam = sorted(_family_masks(independent))
        for mk in fam:
            if mk not in ideal_set:
                raise DomainError(f"family member {bits(mk)} is not an ideal")
    fset = set(fam)
    checks = 1
    if not fam:
        return PropertyReport("poset_matroid", False, {"kind": "empty"}, checks)
    # (M1) on covers: removing a maximal element of an independent ideal stays independent
    for y in fam:
        for e in poset.maximal_in(y):
            checks += 1
            x = y & ~(1 << e)
            if x not in fset:
                return PropertyReport("poset_matroid", False,
                                      {"kind": "M1", "Y": bits(y), "X": bits(x)}, checks)
    # (M2) exchange
    for y in fam:
        ny = bin(y).count("1")
        for x in fam:
            if bin(x).count("1") >= ny:
                continue
            checks += 1
            if not any((x | 1 << e) in fset for e in bits(y & ~x)):
                return PropertyReport("poset_matroid", False,
                                      {"kind": "M2", "X": bits(x), "Y": bits(y)}, checks)
    return PropertyReport("poset_matroid", True, None, checks, {"independent_ideals": len(fam)})


# --- witness re-verification ------------------------------------------------------


def verify_witness(oracle, report, poset=None, independent=None, exact=False):
    """Re-evaluate a failing report's witness; True iff the violation reproduces beyond tolerance."""
    w = report.witness
    if w is None:
        return False
    tau = _tau(exact)
    kind = w["kind"]

    def f(p):
        return _val(oracle(tuple(p)) if oracle.is_lattice else oracle(sum(1 << e for e in p)), exact)

    if kind == "square":
        x, y = tuple(w["x"]), tuple(w["y"])
        meet = tuple(map(min, x, y))
        join = tuple(map(max, x, y))
        return f(x) + f(y) - f(meet) - f(join) < -tau
    if kind == "concavity":
        x = tuple(w["x"])
        e = _unit(len(x), w["i"])
        return (f(_add(x, e)) - f(x)) - (f(_add(x, e, e)) - f(_add(x, e))) < -tau
    if kind == "dr_pair":
        x, y = tuple(w["x"]), tuple(w["y"])
        e = _unit(len(x), w["i"])
        if any(a > b for a, b in zip(x, y)):
            return False
        return (f(_add(x, e)) - f(x)) - (f(_add(y, e)) - f(y)) < -tau
    if kind == "dl_pair":
        p = oracle.domain.poset
        S, T, x, y = set(w["S"]), set(w["T"]), w["x"], w["y"]
        if not S <= T or not p.leq(x, y) or x in S or y in T:
            return False
        return (f(S | {x}) - f(S)) - (f(T | {y}) - f(T)) < -tau
    if kind == "monotone":
        lo, up = w["lower"], w["upper"]
        return f(up) - f(lo) < -tau
    if kind in ("M1", "M2", "empty"):
        ind = _independence(independent)
        if kind == "empty":
            return True
        X = sum(1 << e for e in w["X"])
        Y = sum(1 << e for e in w["Y"])
        if kind == "M1":
            return ind(Y) and not ind(X) and (X & Y) == X and poset.is_ideal_mask(X)
        ok_sizes = bin(X).count("1") < bin(Y).count("1")
        return ok_sizes and ind(X) and ind(Y) and not any(
            poset.is_ideal_mask(X | 1 << e) and ind(X | 1 << e) for e in bits(Y & ~X))
    raise DomainError(f"unknown witness kind {kind!r}")

