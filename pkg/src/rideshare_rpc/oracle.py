"""Exhaustive solvers for desk-scale hypergraphs (ground truth for tests)."""
from __future__ import annotations

import math

from .model import Hypergraph, Matching

STATE_BUDGET = 2**24


class BudgetExceeded(RuntimeError):
    pass


def all_matchings(H: Hypergraph, budget: int = STATE_BUDGET):
    """Yield every matching as ``(ids, weight, served)``, empty one included.

    Backtracks driver by driver: each driver is either unused or takes one
    of its edges whose passengers are still free.
    """
    drivers = sorted(H.drivers)
    per_driver = [[H.edge(i) for i in H.driver_edges[d]] for d in drivers]
    used = set()
    chosen = []
    count = 0

    def rec(k, weight, served):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetExceeded(f"more than {budget} states explored")
        if k == len(drivers):
            yield tuple(sorted(chosen)), weight, served
            return
        yield from rec(k + 1, weight, served)
        for e in per_driver[k]:
            if used.isdisjoint(e.passengers):
                used.update(e.passengers)
                chosen.append(e.id)
                yield from rec(k + 1, weight + e.weight, served + e.size)
                chosen.pop()
                used.difference_update(e.passengers)

    yield from rec(0, 0, 0)


def _best(H, key, feasible=lambda w: True):
    best = None
    best_key = None
    for ids, w, served in all_matchings(H):
        if not feasible(w):
            continue
        k = key(ids, w, served)
        if best_key is None or k > best_key:
            best, best_key = (ids, w, served), k
    if best is None:
        return None
    ids, w, served = best
    return Matching(frozenset(ids), w, served)


def _smallest_ids(ids):
    # larger key wins; negate ids so the lexicographically smallest set wins
    return tuple(-i for i in ids) + (math.inf,)


def brute_rpc1(H: Hypergraph, c):
    """Max cardinality with weight >= c, then max weight, then smallest ids."""
    return _best(H, lambda ids, w, s: (len(ids), w, _smallest_ids(ids)), lambda w: w >= c)


def brute_rpcplus(H: Hypergraph, c):
    """Max passengers served over nonnegative edges with weight >= c."""
    plus = Hypergraph.from_edges(e for e in H.edges if e.weight >= 0)
    return _best(plus, lambda ids, w, s: (s, w, _smallest_ids(ids)), lambda w: w >= c)


def brute_rp(H: Hypergraph) -> Matching:
    """Maximum weight matching over all of ``H``."""
    return _best(H, lambda ids, w, s: (w, s, _smallest_ids(ids)))
