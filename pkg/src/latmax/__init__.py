"""Submodular maximization on bounded integer lattices and distributive lattices."""
from ._common import TAU, DomainError, DomainTooLargeError, LatmaxError
from .constraints import Cardinality, Knapsack, MatroidIntersection, PosetMatroid
from .dl import (
    dl_double_greedy,
    dl_double_greedy_deterministic,
    greedy_cardinality,
    greedy_poset_matroid,
    greedy_s_matroids,
)
from .exact import ExactResult, exact_max, ratio
from .instances import Instance, load_instance, save_instance
from .lattice import (
    DistributiveLattice,
    Ideal,
    IntLattice,
    LinearExtension,
    Poset,
    enumerate_ideals,
    linear_extension,
)
from .oracles import ValueOracle, make_fig3, make_fig4, make_lemma4_counterexample
from .properties import (
    PropertyReport,
    check_dr,
    check_dr_dl,
    check_dr_int_lattice,
    check_monotone,
    check_poset_matroid,
    check_submodular,
)
from .reduction import Hypergraph, dksh_brute_force, extract_dksh_solution, reduce_dksh
from .smbil import double_greedy_smbil, randomized_all_choices, randomized_best_options

__version__ = "0.1.0"
