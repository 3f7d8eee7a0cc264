"""Brute-force optima by full enumeration of the feasible region."""
from dataclasses import dataclass

from ._common import TAU, DomainError, DomainTooLargeError, enum_limit, fmt
from .lattice import Ideal, IntLattice, bits, ideal_masks


@dataclass
class ExactResult:
    value: float
    argmax: object
    enumerated: int
    constraint: str = "none"

    def to_dict(self):
        arg = list(self.argmax) if isinstance(self.argmax, tuple) else list(self.argmax.elements())
        return {"optimum": float(fmt(self.value)), "argmax": arg,
                "points_enumerated": self.enumerated, "constraint": self.constraint}


def feasible_region(oracle, constraint=None, limit=None):
    """Points (tuples) or ideal masks of the feasible region, in fixed enumeration order."""
    dom = oracle.domain
    if isinstance(dom, IntLattice):
        if constraint is not None:
            raise DomainError("constraints are only supported on distributive lattices")
        lim = enum_limit(limit)
        if dom.size > lim:
            raise DomainTooLargeError(f"region of {dom.size} lattice points exceeds the limit {lim}")
        return list(dom.points())
    feas = constraint.feasible_many if constraint is not None else None
    return [int(s) for s in ideal_masks(dom.poset, limit, feasible=feas)]


def exact_max(oracle, constraint=None, limit=None):
    """Maximum of ``oracle`` over the feasible region; ties go to the first point enumerated.

    Lattice points are enumerated in mixed-radix order, ideals in ascending
    mask order.
    """
    region = feasible_region(oracle, constraint, limit)
    if not region:
        raise DomainError("feasible region is empty")
    best_v = None
    best = None
    for p in region:
        v = oracle.raw(p)
        if best_v is None or v > best_v:
            best_v, best = v, p
    if not isinstance(oracle.domain, IntLattice):
        best = Ideal(oracle.domain.poset, best)
    desc = constraint.describe() if constraint is not None else "none"
    return ExactResult(best_v, best, len(region), desc)


def ratio(achieved, exact):
    """``achieved / exact`` clamped to ``[0, 1]``; defined as 1 when ``exact`` is 0."""
    if achieved < -TAU or exact < -TAU:
        raise DomainError("ratio needs nonnegative values")
    if exact <= TAU:
        return 1.0
    return min(1.0, max(0.0, achieved / exact))


def describe_point(p):
    return list(p) if isinstance(p, tuple) else bits(p.mask if isinstance(p, Ideal) else p)
