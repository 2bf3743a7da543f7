import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rideshare_rpc.flow import (
    SSPA, FlowInvariantError, bellman_ford, build_flow_network, cost_sequence_is_convex,
    johnson_reweight, solve_rpc1_exact,
)
from rideshare_rpc.model import build_hypergraph, validate_matching
from rideshare_rpc.oracle import all_matchings, brute_rp, brute_rpc1

from .conftest import random_bipartite, rpc1_targets


def test_network_shape(three_edge):
    N = build_flow_network(three_edge)
    assert N.n == 6 and N.m == 7
    a = N.arc_edge.index(0)
    assert N.cost[a] == -5
    assert N.n_min == 2


def test_empty_network():
    N = build_flow_network(build_hypergraph([]))
    assert N.n == 2 and N.m == 0 and N.n_min == 0
    assert solve_rpc1_exact(build_hypergraph([]), 0).served == 0


def test_zero_weight_single_edge():
    H = build_hypergraph([(1, (1,), 0)])
    M = solve_rpc1_exact(H, 0)
    assert M.served == 1


def test_rejects_hyperedges():
    with pytest.raises(ValueError):
        build_flow_network(build_hypergraph([(1, (1, 2), 3)]))


def test_johnson_worked_example(three_edge):
    N = build_flow_network(three_edge)
    rw = johnson_reweight(N)
    # nodes: s, d1, d2, r1, r2, t
    assert rw.h == [0, 0, 0, -5, -3, -5]
    # arcs: s-d1, s-d2, d1-r1, d1-r2, d2-r1, r1-t, r2-t
    assert rw.cost_hat == [0, 0, 0, 0, 1, 0, 2]


def test_bellman_ford_settles_in_three_rounds(three_edge):
    N = build_flow_network(three_edge)
    full, _ = bellman_ford(N)
    short, changed = bellman_ford(N, 3)
    assert full == short and changed <= 3


def test_sspa_cost_sequence(three_edge):
    sspa = SSPA(build_flow_network(three_edge), check=True)
    assert sspa.step() == (1, -5)
    assert sspa.step() == (2, -7)
    assert sspa.step() is None


def test_solve_examples(three_edge):
    M = solve_rpc1_exact(three_edge, 7)
    assert M.edges == frozenset({1, 2}) and M.weight == 7
    assert solve_rpc1_exact(three_edge, 8) is None
    M = solve_rpc1_exact(three_edge, -math.inf)
    assert (M.served, M.weight) == (2, 7)


def test_trace_exposes_costs(three_edge):
    trace = {}
    solve_rpc1_exact(three_edge, 0, check=True, trace=trace)
    assert trace["costs"] == [0, -5, -7]


def test_convexity_helper():
    assert cost_sequence_is_convex([0, -5, -7, -6, -2])
    assert not cost_sequence_is_convex([0, -5, -3, -4])
    assert cost_sequence_is_convex([0])


def test_invariant_check_fires_on_corruption(three_edge):
    sspa = SSPA(build_flow_network(three_edge), check=True)
    sspa.step()
    sspa.pi[1] += 100
    with pytest.raises(FlowInvariantError):
        sspa.check_invariants()


def _min_cost_by_size(H):
    best = {}
    for ids, w, _ in all_matchings(H):
        best[len(ids)] = min(best.get(len(ids), math.inf), -w)
    return best


def test_flow_costs_equal_best_matching_per_size():
    rng = random.Random(11)
    for _ in range(150):
        H = random_bipartite(rng)
        sspa = SSPA(build_flow_network(H), check=True)
        while sspa.step() is not None:
            pass
        best = _min_cost_by_size(H)
        for y, cy in enumerate(sspa.costs):
            assert cy == best[y]


def test_oracle_equivalence_sample():
    rng = random.Random(3)
    for _ in range(120):
        H = random_bipartite(rng)
        for c in rpc1_targets(brute_rp(H).weight):
            exp, got = brute_rpc1(H, c), solve_rpc1_exact(H, c, check=True)
            assert (exp is None) == (got is None)
            if got is not None:
                assert (len(got), got.weight) == (len(exp), exp.weight)
                assert validate_matching(H, got).ok


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-50, 100)), min_size=1, max_size=20),
       st.integers(-200, 400))
def test_engines_agree(triples, c):
    H = build_hypergraph([(d, (r,), w) for d, r, w in triples])
    assert solve_rpc1_exact(H, c, engine="python") == solve_rpc1_exact(H, c, engine="compiled")
