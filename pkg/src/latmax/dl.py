"""Solvers on distributive lattices given as ideals of a poset.

``greedy_poset_matroid`` and its variants maximize a monotone DR function
under poset-matroid (or cardinality) constraints; ``dl_double_greedy`` is the
unconstrained randomized double greedy for DR functions.  Ideals are int
bitmasks throughout; traces store element lists when serialized.
"""
import math
import random
from dataclasses import asdict, dataclass, field

from ._common import TAU, DomainError
from .constraints import Cardinality, MatroidIntersection, PosetMatroid
from .lattice import Ideal, LinearExtension, Poset, bits, linear_extension, mask_of


# --- greedy under poset-matroid constraints ----------------------------------


@dataclass
class GreedyStep:
    i: int
    element: int
    r: int
    S: int
    value: float
    rho: float


@dataclass
class MatroidGreedyTrace:
    poset: Poset
    processed: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    f0: float = 0.0
    s: int = 1
    k: int = None
    queries: int = 0
    opt: int = None
    opt_value: float = None

    @property
    def solution(self):
        return self.steps[-1].S if self.steps else 0

    @property
    def value(self):
        return self.steps[-1].value if self.steps else self.f0

    def sigmas(self, opt=None):
        """``sigma_i``: OPT elements among processed positions ``r^i .. r^{i+1}-1`` (the first block starts at 1)."""
        opt = self.opt if opt is None else opt
        if opt is None:
            raise DomainError("sigma needs a reference optimum")
        n = len(self.processed)
        starts = [1] + [st.r for st in self.steps[1:]]
        ends = [st.r - 1 for st in self.steps[1:]] + [n]
        out = []
        for lo, hi in zip(starts, ends):
            out.append(sum(1 for e in self.processed[lo - 1:hi] if opt >> e & 1))
        return out

    def to_dict(self):
        return {
            "algo": "matroid-greedy" if self.k is None else "card-greedy",
            "poset": self.poset.to_dict(),
            "processed": list(self.processed),
            "accepted": list(self.accepted),
            "steps": [{**asdict(st), "S": bits(st.S)} for st in self.steps],
            "f0": self.f0, "s": self.s, "k": self.k, "queries": self.queries,
            "opt": bits(self.opt) if self.opt is not None else None,
            "opt_value": self.opt_value,
        }

    @classmethod
    def from_dict(cls, d):
        steps = [GreedyStep(**{**st, "S": mask_of(st["S"])}) for st in d["steps"]]
        return cls(Poset.from_dict(d["poset"]), list(d["processed"]), list(d["accepted"]), steps,
                   d["f0"], d.get("s", 1), d.get("k"), d.get("queries", 0),
                   mask_of(d["opt"]) if d.get("opt") is not None else None, d.get("opt_value"))


def _greedy(oracle, independent, s, k=None, tau=TAU):
    poset = oracle.domain.poset
    f = oracle.raw
    q0 = oracle.queries
    S = 0
    fS = f(S)
    processed = 0
    trace = MatroidGreedyTrace(poset, f0=fS, s=s, k=k)
    while processed != poset.full_mask:
        minimal = [e for e in range(poset.m)
                   if not processed >> e & 1 and poset.strict_below[e] & ~processed == 0]
        admissible = [e for e in minimal if poset.strict_below[e] & ~S == 0]
        if not admissible:
            # every minimal element has a discarded predecessor and can never join S
            for e in minimal:
                processed |= 1 << e
                trace.processed.append(e)
                trace.accepted.append(False)
            continue
        best, best_v = None, None
        for e in admissible:
            v = f(S | 1 << e)
            if best_v is None or v > best_v + tau:
                best, best_v = e, v
        processed |= 1 << best
        trace.processed.append(best)
        if independent(S | 1 << best):
            S |= 1 << best
            trace.steps.append(GreedyStep(len(trace.steps) + 1, best, len(trace.processed),
                                          S, best_v, best_v - fS))
            fS = best_v
            trace.accepted.append(True)
        else:
            trace.accepted.append(False)
    trace.queries = oracle.queries - q0
    return Ideal(poset, S), trace


def _check_poset(oracle, matroid):
    if matroid.poset != oracle.domain.poset:
        raise DomainError("matroid and oracle live on different posets")


def greedy_poset_matroid(oracle, matroid, tau=TAU):
    """Greedy for a monotone DR function under a poset matroid (1/2-approximation).

    Among minimal unprocessed elements whose predecessors are all in ``S``,
    the one with the largest gain (lowest id on ties) is processed and kept
    iff ``S + x`` stays independent.
    """
    _check_poset(oracle, matroid)
    return _greedy(oracle, matroid.independent, 1, tau=tau)


def greedy_cardinality(oracle, k, tau=TAU):
    """Greedy under ``|S| <= k`` (a (1 - 1/e)-approximation for monotone DR functions)."""
    m = oracle.domain.poset.m
    if not 0 <= k <= m:
        raise DomainError(f"k must lie in 0..{m}")
    card = Cardinality(k)
    return _greedy(oracle, card.feasible, 1, k=k, tau=tau)


def greedy_s_matroids(oracle, matroids, tau=TAU):
    """Greedy under the intersection of ``s`` poset matroids (a 1/(s+1)-approximation)."""
    inter = matroids if isinstance(matroids, MatroidIntersection) else MatroidIntersection(matroids)
    for mt in inter.matroids:
        _check_poset(oracle, mt)
    return _greedy(oracle, inter.independent, len(inter.matroids), tau=tau)


def attach_greedy_opt(trace, oracle, opt):
    opt = opt.mask if isinstance(opt, Ideal) else int(opt)
    trace.opt = opt
    trace.opt_value = oracle.raw(opt)
    return trace


def check_greedy_trace(trace, monotone_dr=True, tau=TAU):
    """Violated invariants of a greedy trace, as messages naming the step."""
    out = []
    poset = trace.poset
    try:
        LinearExtension(poset, tuple(trace.processed))
    except DomainError as exc:
        out.append(f"processed order is not a linear extension: {exc}")
    prev_S, prev_v, prev_rho = 0, trace.f0, math.inf
    for st in trace.steps:
        if not poset.is_ideal_mask(st.S):
            out.append(f"step {st.i}: S is not an ideal")
        if st.S != prev_S | 1 << st.element or prev_S >> st.element & 1:
            out.append(f"step {st.i}: S does not grow by exactly the chosen element")
        if abs(st.rho - (st.value - prev_v)) > tau:
            out.append(f"step {st.i}: recorded gain differs from value difference")
        if monotone_dr:
            if st.rho < -tau:
                out.append(f"step {st.i}: negative gain {st.rho}")
            if st.rho > prev_rho + tau:
                out.append(f"step {st.i}: gain increased ({prev_rho} -> {st.rho})")
        prev_S, prev_v, prev_rho = st.S, st.value, st.rho
    if trace.k is not None and len(trace.steps) > trace.k:
        out.append(f"end: {len(trace.steps)} elements exceed k={trace.k}")
    if trace.opt is not None and trace.steps:
        sig = trace.sigmas()
        rhos = [st.rho for st in trace.steps]
        run = 0
        for t, sg in enumerate(sig, 1):
            run += sg
            if run > trace.s * t:
                out.append(f"step {t}: prefix sum of sigma {run} exceeds {trace.s * t}")
        if monotone_dr:
            lhs = sum(sg * r for sg, r in zip(sig, rhos))
            if lhs > trace.s * sum(rhos) + tau:
                out.append(f"end: sum sigma*rho {lhs} exceeds {trace.s} * sum rho {sum(rhos)}")
            if trace.opt_value is not None and trace.opt_value > trace.value + lhs + tau:
                out.append(f"end: f(OPT)={trace.opt_value} exceeds f(S) + sum sigma*rho")
        if monotone_dr and trace.k and trace.opt_value is not None:
            vals = [trace.f0] + [st.value for st in trace.steps]
            for i in range(len(vals) - 1):
                d0, d1 = trace.opt_value - vals[i], trace.opt_value - vals[i + 1]
                if d1 > (1 - 1 / trace.k) * d0 + tau:
                    out.append(f"step {i + 1}: gap {d1} exceeds (1-1/k) * {d0}")
    return out


# --- unconstrained double greedy on D(P) -------------------------------------


@dataclass
class DLStep:
    i: int
    xk: int
    xj: int
    a: float
    b: float
    p_a: float
    moved: str
    A: int
    B: int
    fA: float
    fB: float


@dataclass
class DLDoubleGreedyTrace:
    poset: Poset
    extension: tuple
    fA0: float
    fB0: float
    steps: list = field(default_factory=list)
    algo: str = "dl-dg"
    seed: int = None
    queries: int = 0

    @property
    def solution(self):
        return self.steps[-1].A if self.steps else 0

    @property
    def value(self):
        return self.steps[-1].fA if self.steps else self.fA0

    def states(self):
        """``(A_{i-1}, B_{i-1}, step)`` for every step."""
        A, B = 0, self.poset.full_mask
        for st in self.steps:
            yield A, B, st
            A, B = st.A, st.B

    def to_dict(self):
        return {
            "algo": self.algo, "seed": self.seed, "queries": self.queries,
            "poset": self.poset.to_dict(), "extension": list(self.extension),
            "fA0": self.fA0, "fB0": self.fB0,
            "steps": [{**asdict(st), "A": bits(st.A), "B": bits(st.B)} for st in self.steps],
        }

    @classmethod
    def from_dict(cls, d):
        steps = [DLStep(**{**st, "A": mask_of(st["A"]), "B": mask_of(st["B"])}) for st in d["steps"]]
        return cls(Poset.from_dict(d["poset"]), tuple(d["extension"]), d["fA0"], d["fB0"], steps,
                   d.get("algo", "dl-dg"), d.get("seed"), d.get("queries", 0))


def _extension(poset, extension):
    if extension is None:
        return linear_extension(poset)
    if not isinstance(extension, LinearExtension):
        extension = LinearExtension(poset, tuple(extension))
    elif extension.poset != poset:
        raise DomainError("extension belongs to a different poset")
    return extension


def _dl_pair(poset, order, pos, A, B):
    xk = next(e for e in order if B >> e & 1 and not A >> e & 1)
    xj = max(bits(poset.above[xk] & B), key=pos.__getitem__)
    return xk, xj


def _dl_double_greedy(oracle, extension, chooser, algo, seed=None):
    poset = oracle.domain.poset
    ext = _extension(poset, extension)
    order = ext.order
    pos = ext.positions()
    f = oracle.raw
    q0 = oracle.queries
    A, B = 0, poset.full_mask
    fA, fB = f(A), f(B)
    trace = DLDoubleGreedyTrace(poset, order, fA, fB, algo=algo, seed=seed)
    i = 0
    while A != B:
        i += 1
        xk, xj = _dl_pair(poset, order, pos, A, B)
        vA, vB = f(A | 1 << xk), f(B & ~(1 << xj))
        a, b = vA - fA, vB - fB
        take_a, p = chooser(a, b)
        if take_a:
            A, fA = A | 1 << xk, vA
        else:
            B, fB = B & ~(1 << xj), vB
        trace.steps.append(DLStep(i, xk, xj, a, b, p, "A" if take_a else "B", A, B, fA, fB))
    trace.queries = oracle.queries - q0
    return Ideal(poset, A), trace


def dl_double_greedy(oracle, seed, extension=None):
    """Randomized double greedy for DR functions on ``D(P)`` (1/2-approximation in expectation).

    ``A`` grows by the first extension element outside it, ``B`` shrinks by
    the last-in-extension element of ``B`` above that element; the ``A``-move
    is taken with probability ``a+ / (a+ + b+)`` and 0/0 counts as 0.
    """
    rng = random.Random(seed)

    def chooser(a, b):
        ap, bp = max(a, 0.0), max(b, 0.0)
        p = ap / (ap + bp) if ap + bp > 0 else 0.0
        return rng.random() < p, p

    return _dl_double_greedy(oracle, extension, chooser, "dl-dg", seed)


def dl_double_greedy_deterministic(oracle, extension=None, tau=TAU):
    """Same pair schedule, taking the ``A``-move iff ``a >= b`` (1/3-approximation)."""
    def chooser(a, b):
        return a >= b - tau, None

    return _dl_double_greedy(oracle, extension, chooser, "dl-dg-det")


def step_expectations(oracle, trace, opt):
    """Per step: ``(E[f(OPT_{i-1}) - f(OPT_i)], E[change of f(A) + f(B)])`` over both branches.

    ``OPT_i = (OPT | A_i) & B_i``; the expectation uses the recorded branch
    probability (the deterministic variant puts all mass on its branch).
    """
    opt = opt.mask if isinstance(opt, Ideal) else int(opt)
    out = []
    for A, B, st in trace.states():
        prev = oracle.raw((opt | A) & B)
        via_a = oracle.raw((opt | A | 1 << st.xk) & B)
        via_b = oracle.raw((opt | A) & B & ~(1 << st.xj))
        p = st.p_a if st.p_a is not None else float(st.moved == "A")
        dec = p * (prev - via_a) + (1 - p) * (prev - via_b)
        inc = p * st.a + (1 - p) * st.b
        out.append((dec, inc))
    return out


def check_dl_trace(trace, dr=True, oracle=None, opt=None, tau=TAU):
    """Violated invariants of a DL double-greedy trace, as messages naming the step.

    Structural checks use recorded values only.  With ``oracle`` and ``opt``
    the exact per-step expectation inequality (decrease of ``f(OPT_i)`` at
    most half the expected gain) is checked for the randomized variant.
    """
    out = []
    poset = trace.poset
    try:
        ext = LinearExtension(poset, tuple(trace.extension))
        pos = ext.positions()
    except DomainError as exc:
        return [f"extension invalid: {exc}"]
    fA, fB = trace.fA0, trace.fB0
    for A, B, st in trace.states():
        if A & ~B:
            out.append(f"step {st.i}: A is not contained in B")
        try:
            xk, xj = _dl_pair(poset, ext.order, pos, A, B)
        except (StopIteration, ValueError):
            out.append(f"step {st.i}: no pair available")
            break
        if (xk, xj) != (st.xk, st.xj):
            out.append(f"step {st.i}: recorded pair ({st.xk}, {st.xj}) differs from ({xk}, {xj})")
        if not poset.leq(st.xk, st.xj):
            out.append(f"step {st.i}: x_k is not below x_j")
        if poset.strict_above[st.xj] & B:
            out.append(f"step {st.i}: x_j is not maximal in B")
        exp_A = A | 1 << st.xk if st.moved == "A" else A
        exp_B = B & ~(1 << st.xj) if st.moved == "B" else B
        if (st.A, st.B) != (exp_A, exp_B):
            out.append(f"step {st.i}: recorded sets do not follow the {st.moved}-move")
        for name, s in (("A", st.A), ("B", st.B)):
            if not poset.is_ideal_mask(s):
                out.append(f"step {st.i}: {name} is not an ideal")
        ga = st.fA - fA if st.moved == "A" else None
        gb = st.fB - fB if st.moved == "B" else None
        if ga is not None and abs(ga - st.a) > tau or gb is not None and abs(gb - st.b) > tau:
            out.append(f"step {st.i}: recorded gain differs from value change")
        if st.moved == "A" and abs(st.fB - fB) > tau or st.moved == "B" and abs(st.fA - fA) > tau:
            out.append(f"step {st.i}: value of the unmoved set changed")
        if dr and st.a + st.b < -tau:
            out.append(f"step {st.i}: a + b = {st.a + st.b} is negative")
        if trace.algo == "dl-dg" and st.p_a is not None:
            ap, bp = max(st.a, 0.0), max(st.b, 0.0)
            want = ap / (ap + bp) if ap + bp > 0 else 0.0
            if abs(want - st.p_a) > tau:
                out.append(f"step {st.i}: recorded probability {st.p_a} differs from {want}")
        fA, fB = st.fA, st.fB
    last_A = trace.steps[-1].A if trace.steps else 0
    last_B = trace.steps[-1].B if trace.steps else poset.full_mask
    if last_A != last_B:
        out.append("end: A and B differ")
    if oracle is not None and opt is not None and trace.algo == "dl-dg":
        for (dec, inc), st in zip(step_expectations(oracle, trace, opt), trace.steps):
            if dec > inc / 2 + tau:
                out.append(f"step {st.i}: expected OPT decrease {dec} exceeds half the expected gain {inc}")
    return out
