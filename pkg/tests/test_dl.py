import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latmax._common import DomainError
from latmax.constraints import PosetMatroid
from latmax.dl import (
    DLDoubleGreedyTrace,
    GreedyStep,
    MatroidGreedyTrace,
    attach_greedy_opt,
    check_dl_trace,
    check_greedy_trace,
    dl_double_greedy,
    dl_double_greedy_deterministic,
    greedy_cardinality,
    greedy_poset_matroid,
    greedy_s_matroids,
    step_expectations,
)
from latmax.lattice import DistributiveLattice, Poset, mask_of, random_poset
from latmax.oracles import (
    ValueOracle,
    dr_monotone_dl,
    make_cardinality_oracle,
    make_fig4,
    make_random_dr_monotone_dl,
    on_chains,
)
from latmax.properties import check_poset_matroid
from reference import below_sets, ideals_by_subsets, to_mask

FIG5_COVERS = [(0, 1), (0, 2), (3, 4), (5, 6)]


def brute_opt(f, p, feasible=lambda s: True):
    ideals = [s for s in ideals_by_subsets(p.m, below_sets(p.m, p.covers)) if feasible(s)]
    best = max(ideals, key=lambda s: f.raw(to_mask(s)))
    return to_mask(best), f.raw(to_mask(best))


def test_antichain_uniform_picks_heaviest():
    p = Poset.antichain(3)
    f = dr_monotone_dl(p, [5, 3, 1])
    S, tr = greedy_poset_matroid(f, PosetMatroid.uniform(p, 2))
    assert S.elements() == (0, 1) and tr.value == 8
    assert tr.accepted == [True, True, False]


def test_fig5_poset_uniform_three_cardinality():
    p = Poset(7, FIG5_COVERS)
    f = make_cardinality_oracle(DistributiveLattice(p))
    S, tr = greedy_poset_matroid(f, PosetMatroid.uniform(p, 3))
    assert tr.value == 3 and p.is_ideal_mask(S.mask) and len(S.elements()) == 3
    assert check_greedy_trace(tr) == []


def test_fig5_sigma_blocks():
    # OPT = {x4, x5, x6}, S = {x1, x3, x6}, processed in index order
    p = Poset(7, FIG5_COVERS)
    tr = MatroidGreedyTrace(p, processed=list(range(7)),
                            accepted=[True, False, True, False, False, True, False])
    tr.steps = [GreedyStep(1, 0, 1, 0b1, 1.0, 1.0), GreedyStep(2, 2, 3, 0b101, 2.0, 1.0),
                GreedyStep(3, 5, 6, 0b100101, 3.0, 1.0)]
    tr.opt = mask_of([3, 4, 5])
    assert tr.sigmas() == [0, 2, 1]
    assert tr.steps[1].r == 3


def test_discard_when_no_minimal_element_is_admissible():
    # element 0 is rejected, so 1 can never join
    p = Poset(3, [(0, 1)])
    f = dr_monotone_dl(p, [4, 4, 1])
    S, tr = greedy_poset_matroid(f, PosetMatroid.from_family(p, [[], [2]]))
    assert S.elements() == (2,)
    assert sorted(tr.processed) == [0, 1, 2] and tr.accepted.count(True) == 1


def test_matroid_poset_mismatch():
    f = make_cardinality_oracle(DistributiveLattice(Poset.chain(2)))
    with pytest.raises(DomainError):
        greedy_poset_matroid(f, PosetMatroid.uniform(Poset.antichain(2), 1))
    with pytest.raises(DomainError):
        greedy_cardinality(f, 3)


@st.composite
def dr_instances(draw, max_m=7, monotone=True):
    m = draw(st.integers(1, max_m))
    p = random_poset(m, draw(st.integers(0, 10 ** 6)), draw(st.sampled_from([0.15, 0.3, 0.5])))
    f = make_random_dr_monotone_dl(p, draw(st.integers(0, 10 ** 6)), monotone=monotone)
    return p, f


@settings(max_examples=60, deadline=None)
@given(dr_instances(), st.integers(0, 4))
def test_uniform_matroid_greedy_half(case, k):
    p, f = case
    mt = PosetMatroid.uniform(p, k)
    S, tr = greedy_poset_matroid(f, mt)
    opt, best = brute_opt(f, p, lambda s: len(s) <= k)
    assert tr.value >= best / 2 - 1e-9
    attach_greedy_opt(tr, f, opt)
    assert check_greedy_trace(tr) == []


@settings(max_examples=40, deadline=None)
@given(dr_instances(max_m=5), st.integers(0, 3), st.data())
def test_family_matroid_greedy_half(case, k, data):
    p, f = case
    ideals = ideals_by_subsets(p.m, below_sets(p.m, p.covers))
    keep = data.draw(st.lists(st.booleans(), min_size=len(ideals), max_size=len(ideals)))
    fam = [s for s, b in zip(ideals, keep) if len(s) <= k and (b or len(s) <= 1)]
    mt = PosetMatroid.from_family(p, [sorted(s) for s in fam])
    if not check_poset_matroid(p, mt).holds:
        return
    S, tr = greedy_poset_matroid(f, mt)
    assert frozenset(S.elements()) in set(fam)
    opt, best = brute_opt(f, p, lambda s: s in set(fam))
    assert tr.value >= best / 2 - 1e-9
    attach_greedy_opt(tr, f, opt)
    assert check_greedy_trace(tr) == []


@settings(max_examples=60, deadline=None)
@given(dr_instances(), st.integers(1, 3))
def test_cardinality_greedy_bound(case, k):
    p, f = case
    k = min(k, p.m)
    S, tr = greedy_cardinality(f, k)
    opt, best = brute_opt(f, p, lambda s: len(s) <= k)
    assert tr.value >= (1 - 1 / math.e) * best - 1e-9
    attach_greedy_opt(tr, f, opt)
    assert check_greedy_trace(tr) == []


def test_cardinality_edge_cases():
    p = random_poset(5, 2)
    f = make_random_dr_monotone_dl(p, 2)
    S, tr = greedy_cardinality(f, 0)
    assert S.mask == 0 and tr.value == f.raw(0)
    S, tr = greedy_cardinality(f, 5)
    assert S.mask == p.full_mask


@settings(max_examples=40, deadline=None)
@given(dr_instances(max_m=6), st.integers(1, 4), st.integers(1, 4))
def test_two_uniform_matroids(case, k1, k2):
    p, f = case
    S, tr = greedy_s_matroids(f, [PosetMatroid.uniform(p, k1), PosetMatroid.uniform(p, k2)])
    opt, best = brute_opt(f, p, lambda s: len(s) <= min(k1, k2))
    assert tr.value >= best / 3 - 1e-9
    assert len(S.elements()) <= min(k1, k2)
    attach_greedy_opt(tr, f, opt)
    assert check_greedy_trace(tr) == []


def test_single_matroid_intersection_matches_greedy():
    p = random_poset(6, 4)
    f = make_random_dr_monotone_dl(p, 4)
    mt = PosetMatroid.uniform(p, 3)
    a = greedy_poset_matroid(f, mt)[0]
    b = greedy_s_matroids(f, [mt])[0]
    c = greedy_s_matroids(f, [mt, PosetMatroid.uniform(p, 3)])[0]
    assert a == b == c


def test_greedy_trace_roundtrip_and_fault():
    p = random_poset(6, 1)
    f = make_random_dr_monotone_dl(p, 1)
    _, tr = greedy_cardinality(f, 3)
    attach_greedy_opt(tr, f, brute_opt(f, p, lambda s: len(s) <= 3)[0])
    d = tr.to_dict()
    assert check_greedy_trace(MatroidGreedyTrace.from_dict(d)) == []
    d["steps"][0]["rho"] += 5
    assert any(m.startswith("step 1:") for m in check_greedy_trace(MatroidGreedyTrace.from_dict(d)))


def test_modular_antichain_takes_everything():
    p = Poset.antichain(4)
    f = dr_monotone_dl(p, [1, 2, 3, 4])
    for seed in range(5):
        A, tr = dl_double_greedy(f, seed)
        assert A.mask == p.full_mask
        assert all(st.moved == "A" and st.p_a == 1.0 for st in tr.steps)


@settings(max_examples=60, deadline=None)
@given(dr_instances(max_m=6, monotone=False), st.integers(0, 1000))
def test_dl_double_greedy_invariants(case, seed):
    p, f = case
    opt, best = brute_opt(f, p)
    _, det = dl_double_greedy_deterministic(f)
    assert det.value >= best / 3 - 1e-9
    assert check_dl_trace(det, oracle=f, opt=opt) == []
    _, tr = dl_double_greedy(f, seed)
    assert check_dl_trace(tr, oracle=f, opt=opt) == []
    for dec, inc in step_expectations(f, tr, opt):
        assert dec <= inc / 2 + 1e-9


def test_chain_with_concave_profile():
    p = Poset.chain(5)
    f = dr_monotone_dl(p, [0] * 5, [4, 3, 1, -2, -6], offset=0.0)
    _, det = dl_double_greedy_deterministic(f)
    assert det.value == 8


@pytest.mark.parametrize("x", [10, 100, 1000])
def test_fig4_on_chains_gets_stuck(x):
    f = on_chains(make_fig4(x))
    for seed in range(50):
        _, tr = dl_double_greedy(f, seed, extension=(2, 3, 0, 1))
        assert tr.value == 3
    assert brute_opt(f, f.domain.poset)[1] == x


def test_seed_determinism_and_extension_checks():
    p = random_poset(6, 9)
    f = make_random_dr_monotone_dl(p, 9, monotone=False)
    assert dl_double_greedy(f, 3)[1].steps == dl_double_greedy(f, 3)[1].steps
    chain = make_cardinality_oracle(DistributiveLattice(Poset.chain(3)))
    with pytest.raises(DomainError):
        dl_double_greedy(chain, 0, extension=(2, 1, 0))
    with pytest.raises(DomainError):
        dl_double_greedy(chain, 0, extension=(0, 0, 1))


def test_dl_trace_roundtrip_and_fault():
    p = random_poset(6, 5)
    f = make_random_dr_monotone_dl(p, 5, monotone=False)
    _, tr = dl_double_greedy(f, 1)
    d = tr.to_dict()
    assert check_dl_trace(DLDoubleGreedyTrace.from_dict(d)) == []
    d["steps"][1]["xk"], d["steps"][1]["xj"] = d["steps"][1]["xj"], d["steps"][1]["xk"]
    d["steps"][1]["xk"] = (d["steps"][1]["xk"] + 1) % 6
    assert any(m.startswith("step 2:") for m in check_dl_trace(DLDoubleGreedyTrace.from_dict(d)))


def test_non_dr_trace_reports_negative_pair():
    # a + b < 0 is impossible for DR functions but allowed when dr=False
    p = Poset.antichain(1)
    f = ValueOracle(DistributiveLattice(p), lambda s: 1.0 if s == 0 else 0.0)
    g = ValueOracle(DistributiveLattice(Poset.antichain(2)), lambda s: [1.0, 0.0, 0.0, 1.0][s])
    _, tr = dl_double_greedy_deterministic(g)
    assert any("negative" in m for m in check_dl_trace(tr))
    assert not any("negative" in m for m in check_dl_trace(tr, dr=False))
    assert dl_double_greedy_deterministic(f)[1].value == 1.0
