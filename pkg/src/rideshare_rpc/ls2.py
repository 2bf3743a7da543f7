"""LS2 for RPC+: simple greedy packing plus local search on 1-passenger edges."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .model import Edge, Hypergraph, Matching, split_by_sign


@dataclass(frozen=True)
class Improvement:
    base: int
    replacement: tuple
    gain: int
    weight: int
    riders: int


def simple_greedy(Hplus: Hypergraph) -> Matching:
    """Repeatedly take the heaviest edge disjoint from the current packing."""
    used_d, used_r = set(), set()
    chosen = []
    for e in sorted(Hplus.edges, key=lambda e: (-e.weight, e.id)):
        if e.weight < 0:
            raise ValueError("simple_greedy expects nonnegative edge weights")
        if e.driver in used_d or not used_r.isdisjoint(e.passengers):
            continue
        chosen.append(e.id)
        used_d.add(e.driver)
        used_r.update(e.passengers)
    return Matching.of(Hplus, chosen)


def profit_target_bound(H: Hypergraph, M: Matching, lam: int) -> int:
    """w(M \\ A) + floor(2 w(A) / (lam + 1)), A = single-passenger edges of M."""
    w_single = sum(H.edge(i).weight for i in M.edges if H.edge(i).size == 1)
    return (M.weight - w_single) + (2 * w_single) // (lam + 1)


def _disjoint(a: Edge, b: Edge) -> bool:
    return a.driver != b.driver and a.passengers.isdisjoint(b.passengers)


def find_improvement(H: Hypergraph, M: Matching, e: Edge, c, lam: int,
                     aggressive: bool = False) -> Optional[Improvement]:
    """Best replacement of ``e`` by one or two incident nonnegative edges.

    Candidates must keep the matching vertex-disjoint, serve more than
    ``|R(e)|`` passengers and keep the weight at or above ``c``. For
    ``lam == 2`` only 4-passenger replacements count unless ``aggressive``.
    Among candidates: most new passengers, then heavier, then smaller ids.
    """
    others = [H.edge(i) for i in M.edges if i != e.id]
    busy_d = {o.driver for o in others}
    busy_r = set()
    for o in others:
        busy_r |= o.passengers
    served = busy_r | e.passengers
    nbrs = []
    for i in H.incident(e):
        f = H.edge(i)
        if f.weight < 0 or f.driver in busy_d or not busy_r.isdisjoint(f.passengers):
            continue
        nbrs.append(f)
    candidates = [(f,) for f in nbrs]
    if e.size == 1:
        # two disjoint edges incident to e = {d, r}: one owns d, the other r
        (r,) = e.passengers
        own_d = [f for f in nbrs if f.driver == e.driver and r not in f.passengers]
        own_r = [g for g in nbrs if g.driver != e.driver and r in g.passengers]
        candidates += [tuple(sorted((f, g), key=lambda x: x.id))
                       for f in own_d for g in own_r if _disjoint(f, g)]
    else:
        candidates += [(f, g) for f, g in combinations(nbrs, 2) if _disjoint(f, g)]
    best, best_key = None, None
    for delta in candidates:
        riders = frozenset().union(*(f.passengers for f in delta))
        if len(riders) <= e.size:
            continue
        if lam == 2 and not aggressive and len(riders) != 4:
            continue
        w = sum(f.weight for f in delta)
        if M.weight + w - e.weight < c:
            continue
        gain = len(riders - served)
        key = (gain, w, tuple(-f.id for f in delta))
        if best_key is None or key > best_key:
            best_key = key
            best = Improvement(e.id, tuple(f.id for f in delta), gain, w, len(riders))
    return best


def ls2(H: Hypergraph, c, lam: Optional[int] = None, aggressive: bool = False,
        seed: Optional[Matching] = None, trace: Optional[list] = None):
    """Run LS2 on the nonnegative part of ``H``.

    ``lam`` defaults to the largest edge size. Returns ``None`` if the
    greedy packing already misses ``c``. ``trace`` collects the applied
    improvements.
    """
    Hplus, _ = split_by_sign(H)
    lam = Hplus.max_capacity if lam is None else lam
    M = simple_greedy(Hplus) if seed is None else seed
    if M.weight < c:
        return None
    singles = sorted((Hplus.edge(i) for i in M.edges if Hplus.edge(i).size == 1),
                     key=lambda e: (e.weight, e.id))
    for a in singles:
        imp = find_improvement(Hplus, M, a, c, lam, aggressive)
        if imp is None:
            continue
        ids = (M.edges - {a.id}) | set(imp.replacement)
        new = Matching.of(Hplus, ids)
        assert new.served > M.served and new.weight >= c
        M = new
        if trace is not None:
            trace.append(imp)
    return M
