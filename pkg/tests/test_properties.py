import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latmax._common import DomainTooLargeError
from latmax.constraints import PosetMatroid, fig2_family
from latmax.lattice import DistributiveLattice, IntLattice, Poset, random_poset
from latmax.oracles import (
    ValueOracle,
    make_cardinality_oracle,
    make_constant_oracle,
    make_fig3,
    make_fig4,
    make_random_dr_monotone_dl,
    make_random_submodular_lattice,
    make_table_dl,
    make_table_lattice,
    on_chains,
)
from latmax.properties import (
    check_coordinate_concave,
    check_dr_dl,
    check_dr_int_lattice,
    check_monotone,
    check_poset_matroid,
    check_submodular,
    verify_witness,
)
from reference import below_sets, ideals_by_subsets, to_mask


def brute_dr_dl(m, covers, value, tol=1e-9):
    """DR by definition over element sets: S ⊆ T, x ⪯ y, S+x and T+y ideals, x ∉ S, y ∉ T."""
    below = below_sets(m, covers)
    ideals = set(ideals_by_subsets(m, below))
    for S in ideals:
        for x in range(m):
            if x in S or S | {x} not in ideals:
                continue
            gs = value(S | {x}) - value(S)
            for T in ideals:
                if not S <= T:
                    continue
                for y in range(m):
                    if y in T or (x != y and x not in below[y]) or T | {y} not in ideals:
                        continue
                    if gs < value(T | {y}) - value(T) - tol:
                        return False
    return True


def test_fig3_and_fig4_submodular():
    assert check_submodular(make_fig3(0.1)).holds
    assert check_submodular(make_fig4(1)).holds


def test_supermodular_square_witness():
    f = make_table_lattice(2, 1, [0, 0, 0, 1])
    for mode in ("local", "pairwise"):
        rep = check_submodular(f, mode=mode)
        assert not rep.holds
        assert {tuple(rep.witness["x"]), tuple(rep.witness["y"])} == {(1, 0), (0, 1)}
        assert verify_witness(f, rep)


def test_fig4_is_not_dr():
    f = make_fig4(1)
    for mode in ("characterization", "definition"):
        rep = check_dr_int_lattice(f, mode=mode)
        assert not rep.holds and verify_witness(f, rep)


def test_dr_positive_cases():
    assert check_dr_int_lattice(make_cardinality_oracle(IntLattice(2, 3))).holds
    phi = [0, 5, 8, 10, 11, 11, 10]
    f = ValueOracle(IntLattice(2, 3), lambda x: float(phi[sum(x)]))
    assert check_dr_int_lattice(f).holds
    assert check_dr_int_lattice(f, mode="definition").holds


def test_non_concave_coordinate_witness():
    f = make_table_lattice(1, 2, [0, 1, 3])
    rep = check_coordinate_concave(f)
    assert not rep.holds and rep.witness["kind"] == "concavity"
    assert verify_witness(f, rep)
    assert check_submodular(f).holds  # a single coordinate is trivially submodular


def test_monotone_checks():
    assert check_monotone(make_cardinality_oracle(IntLattice(2, 2))).holds
    assert check_monotone(make_constant_oracle(IntLattice(3, 1))).holds
    rep = check_monotone(make_fig3())
    assert not rep.holds and verify_witness(make_fig3(), rep)
    p = Poset(3, [(0, 1)])
    assert check_monotone(make_cardinality_oracle(DistributiveLattice(p))).holds


def test_dl_checks_on_known_instances():
    p = Poset(4, [(0, 1), (0, 2), (2, 3)])
    assert check_dr_dl(make_cardinality_oracle(DistributiveLattice(p))).holds
    f = on_chains(make_fig4(1))
    for mode in ("local", "definition"):
        rep = check_dr_dl(f, mode=mode)
        assert not rep.holds and verify_witness(f, rep)


def test_exact_mode_uses_zero_tolerance():
    f = make_table_lattice(2, 1, [0, 1, 1, 2 + 1e-12])
    assert check_submodular(f).holds
    assert not check_submodular(f, exact=True).holds


def test_check_limit():
    with pytest.raises(DomainTooLargeError):
        check_submodular(make_random_submodular_lattice(3, 3, 0), limit=10)


def test_uniform_and_free_matroids_hold():
    p = Poset(4, [(0, 1), (2, 3)])
    assert check_poset_matroid(p, PosetMatroid.uniform(p, 2)).holds
    assert check_poset_matroid(p, lambda s: True).holds


def test_fig2_family_violates_exchange():
    fam = fig2_family()
    rep = check_poset_matroid(fam.poset, fam)
    assert not rep.holds
    assert rep.witness == {"kind": "M2", "X": [1], "Y": [0, 2]}
    assert [fam.poset.label(e) for e in rep.witness["Y"]] == ["e1", "e3"]
    assert verify_witness(None, rep, poset=fam.poset, independent=fam)


def test_non_hereditary_family_detected():
    p = Poset.antichain(2)
    rep = check_poset_matroid(p, [[], [0, 1]])
    assert not rep.holds and rep.witness["kind"] == "M1"
    assert verify_witness(None, rep, poset=p, independent=lambda s: s in (0, 3))
    assert check_poset_matroid(p, []).witness == {"kind": "empty"}


@st.composite
def small_tables(draw):
    n = draw(st.integers(1, 3))
    C = draw(st.integers(1, 2))
    vals = draw(st.lists(st.integers(0, 6), min_size=(C + 1) ** n, max_size=(C + 1) ** n))
    return make_table_lattice(n, C, vals)


@settings(max_examples=80, deadline=None)
@given(small_tables())
def test_local_and_pairwise_submodularity_agree(f):
    assert check_submodular(f).holds == check_submodular(f, mode="pairwise").holds


@settings(max_examples=80, deadline=None)
@given(small_tables())
def test_dr_characterization_matches_definition(f):
    a = check_dr_int_lattice(f)
    b = check_dr_int_lattice(f, mode="definition")
    assert a.holds == b.holds
    for rep in (a, b):
        if not rep.holds:
            assert verify_witness(f, rep)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_random_submodular_dr_modes_agree(n, C, seed):
    f = make_random_submodular_lattice(n, C, seed)
    assert check_dr_int_lattice(f).holds == check_dr_int_lattice(f, mode="definition").holds


@st.composite
def dl_tables(draw):
    m = draw(st.integers(1, 5))
    p = random_poset(m, draw(st.integers(0, 1000)), draw(st.sampled_from([0.2, 0.4])))
    below = below_sets(m, p.covers)
    ideals = sorted(ideals_by_subsets(m, below), key=to_mask)
    if draw(st.booleans()):
        base = make_random_dr_monotone_dl(p, draw(st.integers(0, 1000)), monotone=draw(st.booleans()))
        vals = {to_mask(s): base.raw(to_mask(s)) + draw(st.sampled_from([0, 0, 0, 1])) for s in ideals}
    else:
        vals = {to_mask(s): draw(st.integers(0, 5)) for s in ideals}
    return p, vals


@settings(max_examples=100, deadline=None)
@given(dl_tables())
def test_dl_dr_checker_matches_brute_force(case):
    p, vals = case
    f = make_table_dl(p, vals)
    expected = brute_dr_dl(p.m, p.covers, lambda s: vals[to_mask(s)])
    for mode in ("local", "definition"):
        rep = check_dr_dl(f, mode=mode)
        assert rep.holds == expected
        if not rep.holds:
            assert verify_witness(f, rep)


@settings(max_examples=60, deadline=None)
@given(dl_tables())
def test_dl_monotone_matches_brute_force(case):
    p, vals = case
    f = make_table_dl(p, vals)
    below = below_sets(p.m, p.covers)
    ideals = ideals_by_subsets(p.m, below)
    expected = all(vals[to_mask(S)] <= vals[to_mask(T)] for S, T in itertools.product(ideals, ideals) if S <= T)
    assert check_monotone(f).holds == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 1000))
def test_matroid_checker_matches_brute_force(m, k, seed):
    p = random_poset(m, seed)
    ideals = ideals_by_subsets(m, below_sets(m, p.covers))
    rng = random.Random(seed)
    fam = [s for s in ideals if len(s) <= k and (len(s) < 2 or rng.random() < 0.7)]
    fset = set(fam)
    m1 = all(S in fset for T in fam for S in ideals if S <= T)
    m2 = all(any(X | {e} in fset for e in Y - X) for X in fam for Y in fam if len(X) < len(Y))
    rep = check_poset_matroid(p, [sorted(s) for s in fam])
    assert rep.holds == (bool(fam) and m1 and m2)
