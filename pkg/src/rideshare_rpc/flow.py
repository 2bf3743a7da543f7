"""ExactNF2: optimal RPC1 via unit-capacity min-cost flow.

The network has three layers: ``s -> driver -> passenger -> t``. Negative
arc costs are removed with Johnson potentials from a Bellman-Ford run that
stops after 3 rounds (every s-t path has exactly 3 arcs). Flows of value
1, 2, ... are then built by successive shortest paths with node potentials
and early-terminating Dijkstra.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

from .model import Hypergraph, Matching

INF = math.inf
BF_ROUNDS = 3


class FlowInvariantError(AssertionError):
    """A reduced cost went negative or the cost sequence lost convexity."""


@dataclass
class FlowNetwork:
    """Arc lists of the 3-layer network.

    Node 0 is the source, ``n - 1`` the sink; drivers and passengers sit in
    between in ascending id order. ``arc_edge[a]`` is the hypergraph edge id
    of a driver->passenger arc, ``None`` for source/sink arcs.
    """

    n: int
    tail: list
    head: list
    cost: list
    arc_edge: list
    drivers: list
    passengers: list
    capacity: int = 1

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.n - 1

    @property
    def m(self) -> int:
        return len(self.tail)

    @property
    def n_min(self) -> int:
        return min(len(self.drivers), len(self.passengers))


def build_flow_network(H: Hypergraph) -> FlowNetwork:
    if not H.is_bipartite():
        raise ValueError("flow network needs a bipartite hypergraph (every |R_i| = 1)")
    drivers = sorted(H.drivers)
    passengers = sorted(H.passengers)
    dnode = {d: 1 + i for i, d in enumerate(drivers)}
    rnode = {r: 1 + len(drivers) + j for j, r in enumerate(passengers)}
    n = 2 + len(drivers) + len(passengers)
    t = n - 1
    tail, head, cost, arc_edge = [], [], [], []

    def arc(u, v, c, eid=None):
        tail.append(u)
        head.append(v)
        cost.append(c)
        arc_edge.append(eid)

    for d in drivers:
        arc(0, dnode[d], 0)
    for e in H.edges:
        (r,) = e.passengers
        arc(dnode[e.driver], rnode[r], -e.weight, e.id)
    for r in passengers:
        arc(rnode[r], t, 0)
    return FlowNetwork(n, tail, head, cost, arc_edge, drivers, passengers)


@dataclass
class Reweighted:
    """Johnson potentials ``h`` and nonnegative arc costs ``cost_hat``."""

    h: list
    cost_hat: list
    rounds: int
    dropped: list = field(default_factory=list)


def bellman_ford(N: FlowNetwork, rounds: Optional[int] = None):
    """Distances from the source after ``rounds`` relaxation passes.

    ``rounds=None`` runs the textbook ``n - 1`` passes. Returns the distance
    list and the number of passes in which some label changed.
    """
    dist = [INF] * N.n
    dist[0] = 0
    rounds = N.n - 1 if rounds is None else rounds
    changed_rounds = 0
    for _ in range(rounds):
        changed = False
        for u, v, c in zip(N.tail, N.head, N.cost):
            du = dist[u]
            if du != INF and du + c < dist[v]:
                dist[v] = du + c
                changed = True
        if not changed:
            break
        changed_rounds += 1
    return dist, changed_rounds


def johnson_reweight(N: FlowNetwork, rounds: int = BF_ROUNDS) -> Reweighted:
    h, _ = bellman_ford(N, rounds)
    cost_hat = []
    dropped = []
    for a, (u, v, c) in enumerate(zip(N.tail, N.head, N.cost)):
        if h[u] == INF or h[v] == INF:
            # unreachable endpoint: arc cannot carry flow
            cost_hat.append(INF)
            dropped.append(a)
        else:
            cost_hat.append(c + h[u] - h[v])
    return Reweighted(h, cost_hat, rounds, dropped)


class SSPA:
    """Successive shortest paths on the reweighted network.

    ``costs[y]`` is the original cost c(f_y) of the flow of value ``y``
    (``costs[0] == 0``). With ``check=True`` every augmentation re-verifies
    nonnegative reduced costs on the whole residual network and convexity
    of the cost sequence, raising :class:`FlowInvariantError` otherwise.
    """

    def __init__(self, N: FlowNetwork, check: bool = False):
        self.N = N
        self.rw = johnson_reweight(N)
        self.check = check
        self.flow = [0] * N.m
        self.pi = [0] * N.n
        self.costs = [0]
        self.dijkstra_pops = []
        out = [[] for _ in range(N.n)]
        inc = [[] for _ in range(N.n)]
        dropped = set(self.rw.dropped)
        for a in range(N.m):
            if a in dropped:
                continue
            out[N.tail[a]].append(a)
            inc[N.head[a]].append(a)
        self._out = out
        self._in = inc

    @property
    def value(self) -> int:
        return len(self.costs) - 1

    @property
    def cost(self) -> int:
        return self.costs[-1]

    def reduced_cost(self, a: int, backward: bool = False):
        u, v = self.N.tail[a], self.N.head[a]
        c = self.rw.cost_hat[a] - self.pi[u] + self.pi[v]
        return -c if backward else c

    def shortest_path(self):
        """Dijkstra from the source on reduced costs, stopping at the sink.

        Updates the potentials and returns ``(arcs, original_cost)`` for the
        shortest s-t path, ``arcs`` as ``(arc, backward)`` pairs, or ``None``
        when the sink is unreachable (the flow is maximum).
        """
        N = self.N
        s, t = N.source, N.sink
        flow, pi, chat = self.flow, self.pi, self.rw.cost_hat
        tail, head = N.tail, N.head
        dist = {s: 0}
        pred = {}
        done = set()
        heap = [(0, s)]
        pops = 0
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            pops += 1
            if u == t:
                break
            pu = pi[u]
            for a in self._out[u]:
                if flow[a]:
                    continue
                v = head[a]
                if v in done:
                    continue
                nd = d + chat[a] - pu + pi[v]
                if nd < dist.get(v, INF):
                    dist[v] = nd
                    pred[v] = (a, False)
                    heapq.heappush(heap, (nd, v))
            for a in self._in[u]:
                if not flow[a]:
                    continue
                v = tail[a]
                if v in done:
                    continue
                nd = d - chat[a] + pi[v] - pu
                if nd < dist.get(v, INF):
                    dist[v] = nd
                    pred[v] = (a, True)
                    heapq.heappush(heap, (nd, v))
        self.dijkstra_pops.append(pops)
        if t not in done:
            return None
        dt = dist[t]
        for u in range(N.n):
            pi[u] -= dist[u] if u in done else dt
        path = []
        v = t
        delta = 0
        while v != s:
            a, back = pred[v]
            path.append((a, back))
            delta += -N.cost[a] if back else N.cost[a]
            v = tail[a] if not back else head[a]
        path.reverse()
        return path, delta

    def augment(self, path, delta: int) -> int:
        for a, back in path:
            self.flow[a] = 0 if back else 1
        self.costs.append(self.costs[-1] + delta)
        if self.check:
            self.check_invariants()
        return self.costs[-1]

    def step(self):
        """One SSPA iteration; returns ``(y, c(f_y))`` or ``None`` if no path."""
        found = self.shortest_path()
        if found is None:
            return None
        self.augment(*found)
        return self.value, self.cost

    def check_invariants(self):
        for a in range(self.N.m):
            if self.rw.cost_hat[a] == INF:
                continue
            rc = self.reduced_cost(a, backward=bool(self.flow[a]))
            if rc < 0:
                raise FlowInvariantError(
                    f"negative reduced cost {rc} on arc {a} after flow {self.value}"
                )
        if not cost_sequence_is_convex(self.costs):
            raise FlowInvariantError(f"cost sequence lost convexity: {self.costs}")

    def matching(self, H: Hypergraph) -> Matching:
        ids = [self.N.arc_edge[a] for a in range(self.N.m)
               if self.flow[a] and self.N.arc_edge[a] is not None]
        return Matching.of(H, ids)


def cost_sequence_is_convex(costs) -> bool:
    """Once the sequence rises, it never drops below the risen value again."""
    for y in range(len(costs) - 1):
        if costs[y + 1] > costs[y]:
            if any(costs[z] < costs[y + 1] for z in range(y + 2, len(costs))):
                return False
    return True


def run_compiled(N: FlowNetwork, mode: int, target=INF):
    """Compiled SSPA; returns ``(flow per arc, cost sequence)``."""
    import numpy as np

    from ._kernels import sspa_run

    rw = johnson_reweight(N)
    usable = np.array([ch != INF for ch in rw.cost_hat], dtype=np.bool_)
    chat = np.array([0 if ch == INF else ch for ch in rw.cost_hat], dtype=np.int64)
    flow, costs = sspa_run(N.n, np.asarray(N.tail, dtype=np.int64), np.asarray(N.head, dtype=np.int64),
                           np.asarray(N.cost, dtype=np.int64), chat, usable, mode, float(target))
    return flow, costs.tolist()


def flow_matching(N: FlowNetwork, H: Hypergraph, flow) -> Matching:
    ids = [N.arc_edge[a] for a in range(N.m) if flow[a] and N.arc_edge[a] is not None]
    return Matching.of(H, ids)


def solve_rpc1_exact(H: Hypergraph, c, check: bool = False, trace: Optional[dict] = None,
                     engine: str = "auto"):
    """Largest matching with weight >= ``c`` (max weight among equal size).

    Returns a :class:`Matching`, or ``None`` when no matching reaches ``c``.
    ``c`` may be ``-math.inf``. When ``trace`` is a dict it receives the
    cost sequence and the solver state. ``engine="auto"`` uses the compiled
    loop unless invariant checks or a trace are requested.
    """
    N = build_flow_network(H)
    target = -c
    if engine == "compiled" or (engine == "auto" and not check and trace is None):
        from ._kernels import STOP_TARGET

        flow, costs = run_compiled(N, STOP_TARGET, target)
        return flow_matching(N, H, flow) if costs[-1] <= target else None
    sspa = SSPA(N, check=check)
    while True:
        found = sspa.shortest_path()
        if found is None:
            break
        path, delta = found
        nxt = sspa.cost + delta
        if nxt > sspa.cost and nxt > target:
            # convexity: no later flow gets back under the target
            break
        sspa.augment(path, delta)
    if trace is not None:
        trace["costs"] = list(sspa.costs)
        trace["sspa"] = sspa
    if sspa.cost <= target:
        return sspa.matching(H)
    return None
