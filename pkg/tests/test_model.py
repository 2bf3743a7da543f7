import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rideshare_rpc.model import (
    Driver, Edge, FeasibleMatch, Matching, Passenger, VehicleType,
    build_hypergraph, round_cents, split_by_sign, validate_matching,
)

triples = st.lists(
    st.tuples(st.integers(0, 4), st.frozensets(st.integers(0, 6), min_size=1, max_size=3),
              st.integers(-100, 100)),
    max_size=20,
)


def test_empty():
    H = build_hypergraph([])
    assert len(H) == 0 and H.num_vertices == 0


def test_dedup_keeps_first():
    H = build_hypergraph([(1, (1,), 5), (1, (1,), 9)])
    assert len(H) == 1
    assert H.edge(0).weight == 5
    assert H.drivers == {1} and H.passengers == {1}


def test_two_match_incidence():
    H = build_hypergraph([(1, (1,), 5), (2, (1, 2), 7)])
    assert len(H) == 2 and H.num_vertices == 4
    assert H.passenger_edges[1] == (0, 1)
    assert H.check_index()


def test_capacity_violation():
    with pytest.raises(ValueError):
        build_hypergraph([(1, (1, 2), 5)], capacity={1: 1})


def test_from_feasible_matches():
    m = FeasibleMatch(3, (4,), revenue=500, cost=120, profit=380)
    H = build_hypergraph([m])
    assert H.edge(0) == Edge(0, 3, frozenset({4}), 380)


def test_feasible_match_profit_identity():
    with pytest.raises(ValueError):
        FeasibleMatch(1, (1,), revenue=10, cost=3, profit=6)
    with pytest.raises(ValueError):
        FeasibleMatch(1, (), revenue=0, cost=0, profit=0)


def test_split_examples():
    H = build_hypergraph([(1, (1,), 5), (2, (2,), -2), (3, (3,), 0)])
    plus, minus = split_by_sign(H)
    assert [e.weight for e in plus.edges] == [5, 0]
    assert [e.id for e in minus.edges] == [1]
    e_plus, e_minus = split_by_sign(build_hypergraph([]))
    assert len(e_plus) == len(e_minus) == 0
    allpos = build_hypergraph([(1, (1,), 1)])
    p, m = split_by_sign(allpos)
    assert p.edges == allpos.edges and len(m) == 0


def test_validate_examples():
    H = build_hypergraph([(1, (1,), 5), (2, (1, 2), 7), (2, (2,), -2)])
    rep = validate_matching(H, Matching())
    assert rep.ok and rep.weight == 0 and rep.served == 0
    rep = validate_matching(H, [0, 1])
    assert not rep.ok and rep.shared == "passenger 1" and rep.conflict == (0, 1)
    rep = validate_matching(H, Matching.of(H, [0, 2]))
    assert rep.ok and (rep.weight, rep.served) == (3, 2)
    with pytest.raises(KeyError):
        validate_matching(H, [7])


def test_validate_catches_stale_cache():
    H = build_hypergraph([(1, (1,), 5)])
    assert not validate_matching(H, Matching(frozenset({0}), 6, 1)).ok


@given(triples)
def test_hypergraph_invariants(ts):
    H = build_hypergraph(ts)
    assert H.check_index()
    keys = {(e.driver, e.passengers) for e in H.edges}
    assert len(keys) == len(H.edges)
    covered = {e.driver for e in H.edges}
    assert covered == set(H.drivers)
    assert set().union(*[e.passengers for e in H.edges]) == set(H.passengers)
    plus, minus = split_by_sign(H)
    assert len(plus) + len(minus) == len(H)
    assert all(e.weight >= 0 for e in plus.edges) and all(e.weight < 0 for e in minus.edges)


@settings(max_examples=60)
@given(triples, st.data())
def test_validate_iff_pairwise_disjoint(ts, data):
    H = build_hypergraph(ts)
    if not H.edges:
        return
    ids = data.draw(st.sets(st.sampled_from([e.id for e in H.edges]), max_size=4))
    es = [H.edge(i) for i in ids]
    disjoint = all(not a.intersects(b) for a in es for b in es if a.id < b.id)
    assert validate_matching(H, ids).ok == disjoint


def test_round_cents_half_away():
    assert round_cents(637.5) == 638
    assert round_cents(-637.5) == -638
    assert round_cents(637.4999999999999) == 638
    assert round_cents(125.1) == 125
    assert round_cents(0.0) == 0


def test_trip_validation():
    with pytest.raises(ValueError):
        Driver(1, 0, 1, 0, 0, 10, 5, 10)
    with pytest.raises(ValueError):
        Driver(1, 0, 1, 1, 10, 10, 5, 10)
    with pytest.raises(ValueError):
        Passenger(1, 0, 1, 0, 10, 0)
    d = Driver(1, 0, 1, 1, 0, 10, 5, 10, "MediumSUV")
    assert d.vehicle_type is VehicleType.MEDIUM_SUV
