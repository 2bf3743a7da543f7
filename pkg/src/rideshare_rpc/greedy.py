"""Greedy 1/2-approximation for RPC1."""
from __future__ import annotations

from .flow import SSPA, build_flow_network, flow_matching, run_compiled
from .model import Hypergraph, Matching, split_by_sign


def max_weight_matching(H: Hypergraph, engine: str = "compiled") -> Matching:
    """Maximum weight matching of a bipartite hypergraph.

    Only nonnegative edges can help, so SSPA runs on ``Hplus`` and stops at
    the first augmenting path of positive original cost. Zero-cost paths are
    still taken, which keeps the result maximal in ``Hplus``.
    """
    Hplus, _ = split_by_sign(H)
    if not Hplus.edges:
        return Matching()
    N = build_flow_network(Hplus)
    if engine == "compiled":
        from ._kernels import STOP_POSITIVE

        flow, _ = run_compiled(N, STOP_POSITIVE)
        return flow_matching(N, Hplus, flow)
    sspa = SSPA(N)
    while True:
        found = sspa.shortest_path()
        if found is None or found[1] > 0:
            break
        sspa.augment(*found)
    return sspa.matching(Hplus)


def greedy_rpc1(H: Hypergraph, c, seed: Matching = None):
    """Max-weight seed, then add negative edges best-first while w(M) >= c.

    Returns ``None`` if the seed itself misses the target. A precomputed
    seed may be passed to skip the flow computation.
    """
    M = max_weight_matching(H) if seed is None else seed
    if M.weight < c:
        return None
    _, Hminus = split_by_sign(H)
    used_d = set()
    used_r = set()
    for i in M.edges:
        e = H.edge(i)
        used_d.add(e.driver)
        used_r.update(e.passengers)
    chosen = set(M.edges)
    weight, served = M.weight, M.served
    for e in sorted(Hminus.edges, key=lambda e: (-e.weight, e.id)):
        if e.driver in used_d or not used_r.isdisjoint(e.passengers):
            continue
        if weight + e.weight < c:
            break
        chosen.add(e.id)
        used_d.add(e.driver)
        used_r.update(e.passengers)
        weight += e.weight
        served += e.size
    return Matching(frozenset(chosen), weight, served)
