"""Instance JSON: a domain, a function family with parameters, and an optional constraint.

    {"domain": {"type": "int_lattice", "n": 3, "C": 2} | {"type": "dl", "poset": {...}},
     "function": {"family": "fig3", "params": {"epsilon": 0.1}},
     "constraint": {"type": "knapsack", "weights": [...], "budget": 2}}
"""
import json
from dataclasses import dataclass

from ._common import DomainError
from .constraints import constraint_from_dict, constraint_to_dict
from .lattice import DistributiveLattice, IntLattice, Poset, bits, mask_of
from .oracles import (
    LATTICE_FAMILIES,
    make_cardinality_oracle,
    make_random_dr_monotone_dl,
    make_random_submodular_lattice,
    make_table_dl,
    make_table_lattice,
    on_chains,
)


@dataclass
class Instance:
    oracle: object
    constraint: object = None
    name: str = ""

    @property
    def domain(self):
        return self.oracle.domain

    def to_dict(self):
        return instance_to_dict(self.oracle, self.constraint)


def _lattice_oracle(n, C, family, params):
    if family == "cardinality":
        return make_cardinality_oracle(IntLattice(n, C))
    if family == "table":
        return make_table_lattice(n, C, params["values"])
    if family == "random_submodular":
        return make_random_submodular_lattice(n, C, params["seed"], params.get("integer", True))
    if family in LATTICE_FAMILIES:
        oracle = LATTICE_FAMILIES[family](params)
        if (oracle.domain.n, oracle.domain.C) != (n, C):
            raise DomainError(f"family {family} lives on [0..{oracle.domain.C}]^{oracle.domain.n}, "
                              f"not [0..{C}]^{n}")
        return oracle
    raise DomainError(f"unknown family {family!r} for an integer-lattice domain")


def _dl_oracle(poset, family, params):
    if family == "cardinality":
        return make_cardinality_oracle(DistributiveLattice(poset))
    if family == "table":
        return make_table_dl(poset, {mask_of(ids): v for ids, v in params["values"]},
                             params={"values": params["values"]})
    if family == "random_dr_dl":
        return make_random_dr_monotone_dl(poset, params["seed"], params.get("coverage", True),
                                          params.get("universe", 8), params.get("monotone", True))
    if family in LATTICE_FAMILIES or family == "random_submodular":
        # lattice families on n disjoint C-chains
        if family == "random_submodular":
            base = make_random_submodular_lattice(params["n"], params["C"], params["seed"])
        else:
            base = LATTICE_FAMILIES[family](params)
        n, C = base.domain.n, base.domain.C
        if poset != Poset.chains(n, C):
            raise DomainError(f"family {family} needs {n} disjoint chains of length {C}")
        wrapped = on_chains(base)
        wrapped.domain = DistributiveLattice(poset)
        return wrapped
    raise DomainError(f"unknown family {family!r} for a distributive-lattice domain")


def instance_from_dict(d, name=""):
    dom = d["domain"]
    fn = d["function"]
    family = fn["family"]
    params = fn.get("params", {})
    if dom["type"] == "int_lattice":
        oracle = _lattice_oracle(int(dom["n"]), int(dom["C"]), family, params)
        poset = None
    elif dom["type"] == "dl":
        poset = Poset.from_dict(dom["poset"])
        oracle = _dl_oracle(poset, family, params)
    else:
        raise DomainError(f"unknown domain type {dom['type']!r}")
    constraint = constraint_from_dict(poset, d.get("constraint"))
    if constraint is not None and poset is None:
        raise DomainError("constraints are only supported on distributive-lattice domains")
    return Instance(oracle, constraint, name)


def instance_to_dict(oracle, constraint=None):
    dom = oracle.domain
    family = oracle.family
    params = dict(oracle.params)
    if family == "table":
        if isinstance(dom, IntLattice):
            params = {"values": list(oracle.table)}
        elif "values" in params and isinstance(params["values"], dict):
            params = {"values": [[bits(k), v] for k, v in sorted(params["values"].items())]}
    if family == "random_submodular" and isinstance(dom, IntLattice):
        params = {"seed": params["seed"], "integer": params.get("integer", True)}
    if family in ("custom", "constant", "dr_monotone_dl"):
        if isinstance(dom, IntLattice):
            family, params = "table", {"values": [oracle.raw(x) for x in dom.points()]}
        else:
            from .lattice import ideal_masks
            family = "table"
            params = {"values": [[bits(int(s)), oracle.raw(int(s))] for s in ideal_masks(dom.poset)]}
    d = {"domain": dom.to_dict(), "function": {"family": family, "params": params}}
    if constraint is not None:
        d["constraint"] = constraint_to_dict(constraint)
    return d


def load_instance(path):
    with open(path) as fh:
        return instance_from_dict(json.load(fh), name=str(path))


def save_instance(path, oracle, constraint=None):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(oracle, constraint), fh, indent=1)
        fh.write("\n")
