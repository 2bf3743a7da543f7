import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from rideshare_rpc.greedy import greedy_rpc1, max_weight_matching
from rideshare_rpc.model import build_hypergraph, split_by_sign, validate_matching
from rideshare_rpc.oracle import brute_rp, brute_rpc1

from .conftest import random_bipartite, rpc1_targets


def test_mwm_examples(three_edge):
    assert max_weight_matching(build_hypergraph([(1, (1,), 5)])).weight == 5
    M = max_weight_matching(three_edge)
    assert M.edges == frozenset({1, 2}) and M.weight == 7
    M = max_weight_matching(build_hypergraph([(1, (1,), -5), (2, (2,), -1)]))
    assert (M.weight, len(M)) == (0, 0)


def test_greedy_examples():
    H = build_hypergraph([(1, (1,), 5), (2, (2,), 4), (3, (3,), -2)])
    M = greedy_rpc1(H, 7)
    assert (len(M), M.weight, M.served) == (3, 7, 3)
    M = greedy_rpc1(H, 8)
    assert (len(M), M.weight, M.served) == (2, 9, 2)
    assert greedy_rpc1(H, 10) is None


def test_no_negative_edges_returns_seed(three_edge):
    for c in (0, 5, 7):
        assert greedy_rpc1(three_edge, c) == max_weight_matching(three_edge)


def test_mwm_is_maximal_on_hplus_with_zero_edge():
    # the lone zero-weight edge must be taken so the seed stays maximal
    H = build_hypergraph([(1, (1,), 0)])
    assert max_weight_matching(H).served == 1


def test_against_oracle():
    rng = random.Random(7)
    ratios = []
    for _ in range(200):
        H = random_bipartite(rng)
        seed = max_weight_matching(H)
        assert seed.weight == brute_rp(H).weight
        plus, _ = split_by_sign(H)
        used = {H.edge(i).driver for i in seed.edges} | set().union(*[H.edge(i).passengers for i in seed.edges])
        for e in plus.edges:
            if e.id not in seed.edges:
                assert e.driver in used or not used.isdisjoint(e.passengers)
        for c in rpc1_targets(seed.weight)[:4]:
            opt, got = brute_rpc1(H, c), greedy_rpc1(H, c)
            assert validate_matching(H, got).ok and got.weight >= c
            if opt.served:
                ratios.append(Fraction(got.served, opt.served))
    assert min(ratios) >= Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-50, 100)), min_size=1, max_size=20))
def test_mwm_engines_agree(triples):
    H = build_hypergraph([(d, (r,), w) for d, r, w in triples])
    assert max_weight_matching(H, engine="python") == max_weight_matching(H, engine="compiled")
