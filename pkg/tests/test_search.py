import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from isegen.corpus import random_block, random_chain
from isegen.cut import (Constraints, Cut, connected_components, critical_path_hw_latency,
                        io_counts, is_convex, merit)
from isegen.dfg import make_dfg
from isegen.oracle import enumerate_optimal_cut
from isegen.search import (CALIBRATED_WEIGHTS, GainWeights, SearchConfig, SearchState,
                           bipartition, combine_gain, compute_cgp, compute_cnv, compute_idc,
                           compute_iop, compute_mrt, gain)

from conftest import unit_lat


def test_mrt_examples(lat, chain3, diamond):
    assert compute_mrt(SearchState(chain3, lat), 2) == pytest.approx(0.7)
    assert compute_mrt(SearchState(diamond, lat, [1]), 4) == -math.inf
    assert compute_mrt(SearchState(chain3, lat, [2]), 2) == 0


def test_iop_examples(lat):
    c = Constraints(4, 2)
    # (6, 2): three arity-2 sources, two of them live-out
    g = make_dfg([1, 2, 3], [], live_out=[1, 2])
    assert compute_iop(SearchState(g, lat, [1, 2]), 3, c) == 2
    # (5, 3): arities 2, 2, 1, all live-out
    g = make_dfg([1, 2, 3], [], live_out=[1, 2, 3], arity={3: 1})
    assert compute_iop(SearchState(g, lat, [1, 2]), 3, c) == 2
    # (4, 2): no violation
    g = make_dfg([1, 2], [], live_out=[1, 2])
    assert compute_iop(SearchState(g, lat, [1]), 2, c) == 0


def test_cnv_examples(lat):
    g = make_dfg([1, 2, 3, 4, 9], [(1, 2), (2, 3), (2, 4)])
    assert compute_cnv(SearchState(g, lat, [1, 3]), 2) == 2
    assert compute_cnv(SearchState(g, lat, [1, 2, 3]), 2) == -2
    assert compute_cnv(SearchState(g, lat, [1, 2]), 9) == 0


def test_cgp_examples(lat):
    g = make_dfg([1, 2, 3], [(1, 2), (2, 3)], live_out=[3])
    assert compute_cgp(SearchState(g, lat), 1) == 2
    assert compute_cgp(SearchState(g, lat, [1]), 1) == -2
    assert compute_cgp(SearchState(g, lat), 2) == 0
    assert compute_cgp(SearchState(g, lat, [2]), 2) == 0


def test_idc_examples(lat):
    g = make_dfg([1, 5, 6, 7], [(5, 6), (6, 7)])
    assert compute_idc(SearchState(g, lat, [5, 6, 7]), 1) == 0
    assert compute_idc(SearchState(g, lat, [1, 5, 6, 7]), 1) == pytest.approx(0.9)
    assert compute_idc(SearchState(g, lat, [5, 6, 7]), 6) == 0


def test_gain_examples():
    w = GainWeights(1, 10, 1, 1, 1)
    assert combine_gain(w, 0, 0, 0, 0, 0) == 0
    assert combine_gain(w, 2.1, 0, 2, 1, 0) == pytest.approx(5.1)
    assert combine_gain(w, -math.inf, 0, 100, 100, 100) == -math.inf


def test_gain_is_weighted_sum(lat, diamond):
    cfg = SearchConfig(weights=GainWeights(1, 10, 1, 1, 1), constraints=Constraints(1, 1))
    s = SearchState(diamond, lat, [1, 2])
    for n in (2, 3):
        expected = combine_gain(cfg.weights, compute_mrt(s, n),
                                compute_iop(s, n, cfg.constraints), compute_cnv(s, n),
                                compute_cgp(s, n), compute_idc(s, n))
        assert gain(s, n, cfg) == pytest.approx(expected)
    assert gain(s, 4, cfg) == -math.inf


def test_weights_parse_and_validate():
    assert GainWeights.parse("1,10,0.25,0.1,1") == CALIBRATED_WEIGHTS
    with pytest.raises(ValueError):
        GainWeights.parse("1,2,3")
    with pytest.raises(ValueError):
        GainWeights(-1, 10, 0, 0, 0)
    with pytest.raises(ValueError):
        SearchConfig(max_passes=0)
    w = CALIBRATED_WEIGHTS
    assert w.iop >= 10 * max(w.mrt, w.cnv, w.cgp, w.idc)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 30))
def test_incremental_components_match_definitions(seed, n):
    rng = random.Random(seed)
    g = random_block(rng, n, mem_ratio=0.1)
    lat = unit_lat(hw=0.35)
    cand = [x.id for x in g.nodes if not x.is_memory]
    members = [c for c in cand if rng.random() < 0.4]
    s = SearchState(g, lat, members)
    base = set(members)
    for nid in cand:
        after = Cut(g, base ^ {nid})
        m = compute_mrt(s, nid)
        if is_convex(after):
            assert m == pytest.approx(merit(after, lat))
        else:
            assert m == -math.inf
        if nid in base:
            comps = connected_components(Cut(g, base))
            others = [critical_path_hw_latency(Cut(g, c), lat) for c in comps if nid not in c]
            assert compute_idc(s, nid) == pytest.approx(max(others, default=0.0))
        else:
            assert compute_idc(s, nid) == 0


def test_bipartition_chain(lat):
    g = make_dfg([1, 2, 3], [(1, 2), (2, 3)], live_out=[3])
    cut = bipartition(g, SearchConfig(), lat)
    assert cut.members == {1, 2, 3}
    assert merit(cut, lat) == pytest.approx(2.1)
    assert merit(cut, lat) == pytest.approx(enumerate_optimal_cut(g, Constraints(), lat)[1])


def test_bipartition_all_memory(lat):
    g = make_dfg({1: "load", 2: "store"}, [(1, 2)], mem=[1, 2])
    assert bipartition(g, SearchConfig(), lat).members == frozenset()


def test_bipartition_pinned_diamond(lat, diamond):
    cfg = SearchConfig(constraints=Constraints(2, 1))
    cut = bipartition(diamond, cfg, lat)
    best, m = enumerate_optimal_cut(diamond, cfg.constraints, lat)
    assert best.members == {1, 2, 3, 4} and io_counts(best) == (1, 1)
    assert cut == best and merit(cut, lat) == pytest.approx(m)


def legal(cut, c):
    i, o = io_counts(cut)
    return (is_convex(cut) and i <= c.n_in and o <= c.n_out
            and not any(cut.dfg.node(m).is_memory for m in cut.members))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 40), st.integers(1, 4), st.integers(1, 3))
def test_bipartition_legal_and_monotone(seed, n, n_in, n_out):
    rng = random.Random(seed)
    g = random_block(rng, n, mem_ratio=0.15)
    lat = unit_lat()
    cfg = SearchConfig(constraints=Constraints(n_in, n_out))
    trace = []
    cut = bipartition(g, cfg, lat, trace=trace)
    assert legal(cut, cfg.constraints)
    assert merit(cut, lat) > 0 or not cut.members
    assert 1 <= len(trace) <= cfg.max_passes
    for rec in trace:
        assert rec.toggles <= len(g)
        assert rec.best_merit >= rec.start_merit
    for a, b in zip(trace, trace[1:]):
        assert b.start_merit >= a.start_merit


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 12))
def test_never_worse_than_initial_cut(seed, n):
    rng = random.Random(seed)
    g = random_block(rng, n)
    lat = unit_lat()
    cfg = SearchConfig()
    seed_cut, m = enumerate_optimal_cut(g, cfg.constraints, lat)
    cut = bipartition(g, cfg, lat, seed_cut)
    assert merit(cut, lat) >= m - 1e-12
    assert legal(cut, cfg.constraints)


def test_delta_variant_selects_same_cuts():
    # the delta only shifts every candidate's score by the same amount
    rng = random.Random(17)
    lat = unit_lat()
    for _ in range(60):
        g = random_block(rng, rng.randint(2, 25))
        a = bipartition(g, SearchConfig(), lat)
        b = bipartition(g, SearchConfig(mrt_delta=True), lat)
        assert a == b


def test_deterministic():
    rng = random.Random(4)
    lat = unit_lat()
    for _ in range(20):
        g = random_block(rng, rng.randint(5, 30))
        assert bipartition(g, SearchConfig(), lat) == bipartition(g, SearchConfig(), lat)


def test_chains_are_solved_exactly():
    rng = random.Random(99)
    lat = unit_lat()
    for i in range(50):
        g = random_chain(rng, rng.randint(1, 15))
        got = merit(bipartition(g, SearchConfig(), lat), lat)
        assert got == pytest.approx(enumerate_optimal_cut(g, Constraints(), lat)[1])


def test_frozen_nodes_excluded(lat):
    g = make_dfg([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4)], live_out=[4])
    cut = bipartition(g, SearchConfig(), lat, frozen=[2])
    assert 2 not in cut.members and is_convex(cut)
