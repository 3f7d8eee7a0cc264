"""Double greedy on the bounded integer lattice and its two randomized variants.

All solvers keep a lower vector ``a`` (starting at 0) and an upper vector
``b`` (starting at C) and settle one component at a time until ``a == b``.
Every run returns ``(solution, trace)``; traces record each change of ``a``
or ``b`` with the values before and after so invariants can be re-checked
from the trace alone.
"""
import random
from dataclasses import asdict, dataclass, field

from ._common import TAU, LatmaxError


@dataclass
class SmbilStep:
    i: int
    k: int
    moved: str
    c: int
    a: tuple
    b: tuple
    fa: float
    fb: float
    delta_a: float = None
    delta_b: float = None
    p_a: float = None
    opt_value: float = None


@dataclass
class SmbilTrace:
    algo: str
    n: int
    C: int
    a0: tuple
    b0: tuple
    fa0: float
    fb0: float
    steps: list = field(default_factory=list)
    order: list = field(default_factory=list)
    queries: int = 0
    seed: int = None
    opt: tuple = None
    opt0_value: float = None

    @property
    def solution(self):
        return self.steps[-1].a if self.steps else self.a0

    @property
    def value(self):
        return self.steps[-1].fa if self.steps else self.fa0

    def to_dict(self):
        d = asdict(self)
        d["steps"] = [asdict(s) for s in self.steps]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        steps = [SmbilStep(**{**s, "a": tuple(s["a"]), "b": tuple(s["b"])}) for s in d.pop("steps")]
        for key in ("a0", "b0", "opt"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(steps=steps, **d)


def _set(v, k, c):
    w = list(v)
    w[k] = c
    return tuple(w)


def _component_gains(f, a, b, k, fa, fb, C):
    """Values of ``f(a|a_k=c)`` and ``f(b|b_k=c)`` for every ``c``; the unchanged entry reuses ``fa``/``fb``."""
    va = [fa if c == a[k] else f(_set(a, k, c)) for c in range(C + 1)]
    vb = [fb if c == b[k] else f(_set(b, k, c)) for c in range(C + 1)]
    return va, vb


def _best_moves(va, vb, fa, fb, tau):
    da = max(va) - fa
    db = max(vb) - fb
    # maximal maximizer for a, minimal maximizer for b
    ca = max(c for c, v in enumerate(va) if v - fa >= da - tau)
    cb = min(c for c, v in enumerate(vb) if v - fb >= db - tau)
    return da, db, ca, cb


def _order_list(order, n):
    if order in ("fixed", None):
        return list(range(n))
    if order == "greedy":
        return None
    order = [int(k) for k in order]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the components")
    return order


def _double_greedy(oracle, order, chooser, algo, seed=None, tau=TAU):
    dom = oracle.domain
    n, C = dom.n, dom.C
    f = oracle.raw
    q0 = oracle.queries
    a = (0,) * n
    b = (C,) * n
    fa, fb = f(a), f(b)
    trace = SmbilTrace(algo, n, C, a, b, fa, fb, seed=seed)
    fixed = _order_list(order, n)
    remaining = list(range(n))
    i = 1
    for t in range(n):
        if fixed is not None:
            k = fixed[t]
            va, vb = _component_gains(f, a, b, k, fa, fb, C)
        else:
            # gain-greedy: the component with the largest available increase, ties to the lowest index
            cand = {}
            for kk in remaining:
                cand[kk] = _component_gains(f, a, b, kk, fa, fb, C)
            gains = {kk: max(max(va_) - fa, max(vb_) - fb) for kk, (va_, vb_) in cand.items()}
            best = max(gains.values())
            k = min(kk for kk in remaining if gains[kk] >= best - tau)
            va, vb = cand[k]
        remaining.remove(k)
        trace.order.append(k)
        da, db, ca, cb = _best_moves(va, vb, fa, fb, tau)
        take_a, p_a = chooser(da, db)
        if take_a:
            c = ca
            a = _set(a, k, c)
            fa = va[c]
            trace.steps.append(SmbilStep(i, k, "a", c, a, b, fa, fb, da, db, p_a))
            b = _set(b, k, c)
            fb = vb[c]
            trace.steps.append(SmbilStep(i + 1, k, "b", c, a, b, fa, fb, da, db, p_a))
        else:
            c = cb
            b = _set(b, k, c)
            fb = vb[c]
            trace.steps.append(SmbilStep(i, k, "b", c, a, b, fa, fb, da, db, p_a))
            a = _set(a, k, c)
            fa = va[c]
            trace.steps.append(SmbilStep(i + 1, k, "a", c, a, b, fa, fb, da, db, p_a))
        i += 2
    trace.queries = oracle.queries - q0
    return a, trace


def double_greedy_smbil(oracle, order="fixed", tau=TAU):
    """Deterministic double greedy on ``[0..C]^n`` (1/3-approximation for submodular ``f``).

    For each component ``k`` the best single-entry change of ``a`` and of ``b``
    are compared; the larger gain wins (``a`` on ties), the winning vector
    takes the maximizing value (maximal one for ``a``, minimal one for ``b``)
    and the other vector is set to the same entry.

    ``order`` is ``"fixed"`` (components 0..n-1), ``"greedy"`` (the component
    with the largest available gain next) or an explicit permutation.
    """
    def chooser(da, db):
        return da >= db - tau, None

    return _double_greedy(oracle, order, chooser, "dg13", tau=tau)


def randomized_best_options(oracle, seed, order="fixed", tau=TAU):
    """Double greedy that takes the ``a``-move with probability ``δa / (δa + δb)`` (0/0 means the ``b``-move)."""
    rng = random.Random(seed)

    def chooser(da, db):
        pa_w, pb_w = max(da, 0.0), max(db, 0.0)
        p = pa_w / (pa_w + pb_w) if pa_w + pb_w > 0 else 0.0
        return rng.random() < p, p

    return _double_greedy(oracle, order, chooser, "rand-best", seed=seed, tau=tau)


def randomized_all_choices(oracle, seed, order="fixed", tau=TAU):
    """Randomized variant choosing among every single-entry move in proportion to its positive gain.

    While ``a_k < b_k`` every move ``a_k := c`` (``a_k < c <= b_k``) and
    ``b_k := c`` (``a_k <= c < b_k``) with a positive gain is a candidate.  If
    none has a positive gain, ``a_k`` moves to the smallest zero-gain value
    above it, else ``b_k`` to the largest zero-gain value below it.
    """
    dom = oracle.domain
    n, C = dom.n, dom.C
    f = oracle.raw
    rng = random.Random(seed)
    q0 = oracle.queries
    a = (0,) * n
    b = (C,) * n
    fa, fb = f(a), f(b)
    trace = SmbilTrace("rand-all", n, C, a, b, fa, fb, seed=seed)
    order = _order_list(order, n)
    if order is None:
        raise ValueError("randomized_all_choices supports fixed or explicit orders only")
    i = 1
    for k in order:
        trace.order.append(k)
        # candidates only vary in entry k, so each value is queried once per component
        va, vb = {a[k]: fa}, {b[k]: fb}
        while a[k] < b[k]:
            moves = []
            for c in range(a[k] + 1, b[k] + 1):
                if c not in va:
                    va[c] = f(_set(a, k, c))
                moves.append(("a", c, va[c]))
            for c in range(a[k], b[k]):
                if c not in vb:
                    vb[c] = f(_set(b, k, c))
                moves.append(("b", c, vb[c]))
            gains = [(v - (fa if side == "a" else fb)) for side, _, v in moves]
            pos = [(g, t) for t, g in enumerate(gains) if g > tau]
            if pos:
                total = sum(g for g, _ in pos)
                u = rng.random() * total
                acc = 0.0
                pick = pos[-1][1]
                for g, t in pos:
                    acc += g
                    if u < acc:
                        pick = t
                        break
                p = gains[pick] / total
            else:
                zero_a = [t for t, (side, c, _) in enumerate(moves) if side == "a" and abs(gains[t]) <= tau]
                zero_b = [t for t, (side, c, _) in enumerate(moves) if side == "b" and abs(gains[t]) <= tau]
                if zero_a:
                    pick = zero_a[0]
                elif zero_b:
                    pick = zero_b[-1]
                else:
                    raise LatmaxError(f"no non-decreasing move for component {k} at a={a}, b={b}")
                p = None
            side, c, v = moves[pick]
            if side == "a":
                a, fa = _set(a, k, c), v
            else:
                b, fb = _set(b, k, c), v
            trace.steps.append(SmbilStep(i, k, side, c, a, b, fa, fb, p_a=p))
            i += 1
    trace.queries = oracle.queries - q0
    return a, trace


def attach_opt(trace, oracle, opt):
    """Record ``f((OPT ∨ a^i) ∧ b^i)`` for every step (analysis only; run after the solve)."""
    opt = tuple(opt)
    trace.opt = opt
    trace.opt0_value = oracle(tuple(map(min, map(max, opt, trace.a0), trace.b0)))
    for s in trace.steps:
        s.opt_value = oracle(tuple(map(min, map(max, opt, s.a), s.b)))
    return trace


def first_step_changes(trace):
    """``(f(OPT^0) - f(OPT^1), f(a^1) - f(a^0) + f(b^1) - f(b^0))`` of a trace with OPT attached."""
    s = trace.steps[0]
    dec = trace.opt0_value - s.opt_value
    inc = (s.fa - trace.fa0) + (s.fb - trace.fb0)
    return dec, inc


def check_smbil_trace(trace, tau=TAU):
    """Re-check trace invariants from recorded values; returns a list of violation messages."""
    out = []
    n, C = trace.n, trace.C
    if tuple(trace.a0) != (0,) * n or tuple(trace.b0) != (C,) * n:
        out.append("start: a^0 must be all zeros and b^0 all C")
    pa, pb, pfa, pfb = trace.a0, trace.b0, trace.fa0, trace.fb0
    popt = trace.opt0_value
    for s in trace.steps:
        if any(x > y for x, y in zip(s.a, s.b)):
            out.append(f"step {s.i}: a > b in some entry ({list(s.a)} vs {list(s.b)})")
        changed = sum(x != y for x, y in zip(s.a, pa)) + sum(x != y for x, y in zip(s.b, pb))
        if changed > 1:
            out.append(f"step {s.i}: more than one entry changed")
        if s.fa < pfa - tau:
            out.append(f"step {s.i}: f(a) decreased ({pfa} -> {s.fa})")
        if s.fb < pfb - tau:
            out.append(f"step {s.i}: f(b) decreased ({pfb} -> {s.fb})")
        if trace.algo == "dg13" and popt is not None and s.opt_value is not None:
            if popt - s.opt_value > (s.fa - pfa) + (s.fb - pfb) + tau:
                out.append(f"step {s.i}: OPT decrease {popt - s.opt_value} exceeds gain "
                           f"{(s.fa - pfa) + (s.fb - pfb)}")
        pa, pb, pfa, pfb = s.a, s.b, s.fa, s.fb
        popt = s.opt_value
    if tuple(pa) != tuple(pb):
        out.append("end: a and b differ")
    if trace.algo in ("dg13", "rand-best") and len(trace.steps) != 2 * n:
        out.append(f"end: expected {2 * n} steps, found {len(trace.steps)}")
    if trace.algo == "dg13" and trace.opt0_value is not None:
        if trace.opt0_value > 3 * trace.value + tau:
            out.append(f"end: f(OPT)={trace.opt0_value} exceeds 3 f(a)={3 * trace.value}")
        if trace.steps and trace.steps[-1].opt_value is not None \
                and abs(trace.steps[-1].opt_value - trace.value) > tau:
            out.append("end: final OPT interpolation differs from the solution value")
    return out
