"""Trips, feasible matches, the match hypergraph and matchings.

Money is always an ``int`` number of cents. Times are integer seconds
from the start of the batch interval, distances integer meters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

MAX_SAFE_CENTS = 2**53


class VehicleType(str, Enum):
    SMALL_SEDAN = "SmallSedan"
    MEDIUM_SEDAN = "MediumSedan"
    MEDIUM_SUV = "MediumSUV"


def round_cents(x: float) -> int:
    """Round a cent amount half away from zero.

    The value is first snapped to 6 decimals so that float noise such as
    ``637.5000000000001`` or ``637.4999999999999`` lands on the intended tie.
    """
    v = round(float(x), 6)
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


@dataclass(frozen=True)
class Driver:
    id: int
    origin: int
    destination: int
    capacity: int
    earliest_departure: int
    latest_arrival: int
    detour_limit: int
    max_duration: int
    vehicle_type: VehicleType = VehicleType.SMALL_SEDAN

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"driver {self.id}: capacity must be >= 1")
        if self.earliest_departure >= self.latest_arrival:
            raise ValueError(f"driver {self.id}: empty time window")
        if self.detour_limit < 0:
            raise ValueError(f"driver {self.id}: negative detour limit")
        if self.max_duration <= 0:
            raise ValueError(f"driver {self.id}: max_duration must be > 0")
        object.__setattr__(self, "vehicle_type", VehicleType(self.vehicle_type))


@dataclass(frozen=True)
class Passenger:
    id: int
    origin: int
    destination: int
    earliest_departure: int
    latest_arrival: int
    max_duration: int
    surge_factor: float = 1.0
    tip_expectation: int = 0

    def __post_init__(self):
        if self.earliest_departure >= self.latest_arrival:
            raise ValueError(f"passenger {self.id}: empty time window")
        if self.max_duration <= 0:
            raise ValueError(f"passenger {self.id}: max_duration must be > 0")
        if self.surge_factor < 0 or self.tip_expectation < 0:
            raise ValueError(f"passenger {self.id}: negative surge or tip")


@dataclass(frozen=True)
class FeasibleMatch:
    """A driver, the passengers it serves, and the route it follows.

    ``path`` is the stop sequence (driver origin, pickups/dropoffs, driver
    destination); ``order`` lists the same stops as ``(passenger, 0|1)``
    tokens, 0 for a pickup and 1 for a dropoff. ``take_rates`` is aligned
    with ``passengers`` and is kept so the profit can be re-evaluated.
    """

    driver: int
    passengers: tuple
    path: tuple = ()
    order: tuple = ()
    distance: int = 0
    revenue: int = 0
    cost: int = 0
    profit: int = 0
    take_rates: tuple = ()

    def __post_init__(self):
        if not self.passengers:
            raise ValueError("a match needs at least one passenger")
        if self.profit != self.revenue - self.cost:
            raise ValueError("profit must equal revenue - cost")

    @property
    def key(self):
        return self.driver, frozenset(self.passengers)


@dataclass(frozen=True)
class Edge:
    id: int
    driver: int
    passengers: frozenset
    weight: int

    @property
    def size(self) -> int:
        return len(self.passengers)

    def intersects(self, other: "Edge") -> bool:
        return self.driver == other.driver or not self.passengers.isdisjoint(other.passengers)


def _index(edges: Iterable[Edge]):
    by_driver: dict = {}
    by_passenger: dict = {}
    for e in edges:
        by_driver.setdefault(e.driver, []).append(e.id)
        for r in sorted(e.passengers):
            by_passenger.setdefault(r, []).append(e.id)
    return (
        {d: tuple(ids) for d, ids in by_driver.items()},
        {r: tuple(ids) for r, ids in by_passenger.items()},
    )


@dataclass(frozen=True)
class Hypergraph:
    """Weighted hypergraph whose edges are feasible matches.

    Vertices are exactly the drivers/passengers covered by some edge, so the
    graph never has isolated vertices. Edge ids are stable across
    :func:`split_by_sign`.
    """

    edges: tuple = ()
    driver_edges: Mapping = field(default_factory=dict)
    passenger_edges: Mapping = field(default_factory=dict)
    _by_id: Mapping = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "Hypergraph":
        edges = tuple(sorted(edges, key=lambda e: e.id))
        by_driver, by_passenger = _index(edges)
        return cls(edges, by_driver, by_passenger, {e.id: e for e in edges})

    @property
    def drivers(self) -> frozenset:
        return frozenset(self.driver_edges)

    @property
    def passengers(self) -> frozenset:
        return frozenset(self.passenger_edges)

    @property
    def num_vertices(self) -> int:
        return len(self.driver_edges) + len(self.passenger_edges)

    def __len__(self):
        return len(self.edges)

    def __contains__(self, edge_id) -> bool:
        return edge_id in self._by_id

    def edge(self, edge_id: int) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise KeyError(f"unknown edge id {edge_id}") from None

    def incident(self, e: Edge) -> list:
        """Ids of edges sharing a vertex with ``e`` (``e`` excluded), ascending."""
        ids = set(self.driver_edges.get(e.driver, ()))
        for r in e.passengers:
            ids.update(self.passenger_edges.get(r, ()))
        ids.discard(e.id)
        return sorted(ids)

    @property
    def max_capacity(self) -> int:
        return max((e.size for e in self.edges), default=0)

    def is_bipartite(self) -> bool:
        return all(e.size == 1 for e in self.edges)

    def check_index(self) -> bool:
        """Rebuild the incidence lists from scratch and compare."""
        by_driver, by_passenger = _index(self.edges)
        return by_driver == dict(self.driver_edges) and by_passenger == dict(self.passenger_edges)


def build_hypergraph(matches: Sequence, capacity: Optional[Mapping] = None) -> Hypergraph:
    """Turn a list of matches into a hypergraph.

    Accepts :class:`FeasibleMatch` objects or plain ``(driver, passengers,
    weight)`` triples. Duplicates (same driver and passenger set) keep the
    first occurrence. ``capacity`` maps driver id to capacity; when given,
    a match larger than its driver's capacity raises ``ValueError``.
    """
    seen = set()
    edges = []
    for m in matches:
        if isinstance(m, FeasibleMatch):
            driver, passengers, weight = m.driver, m.passengers, m.profit
        else:
            driver, passengers, weight = m
        passengers = frozenset(passengers)
        if not passengers:
            raise ValueError(f"match of driver {driver} has no passengers")
        if capacity is not None and len(passengers) > capacity[driver]:
            raise ValueError(
                f"match of driver {driver} serves {len(passengers)} passengers, "
                f"capacity is {capacity[driver]}"
            )
        if (driver, passengers) in seen:
            continue
        seen.add((driver, passengers))
        edges.append(Edge(len(edges), driver, passengers, int(weight)))
    return Hypergraph.from_edges(edges)


def split_by_sign(H: Hypergraph):
    """Return ``(Hplus, Hminus)``; zero-weight edges go to ``Hplus``."""
    plus = [e for e in H.edges if e.weight >= 0]
    minus = [e for e in H.edges if e.weight < 0]
    return Hypergraph.from_edges(plus), Hypergraph.from_edges(minus)


def subgraph(H: Hypergraph, keep) -> Hypergraph:
    return Hypergraph.from_edges(e for e in H.edges if keep(e))


@dataclass(frozen=True)
class Matching:
    edges: frozenset = frozenset()
    weight: int = 0
    served: int = 0

    @classmethod
    def of(cls, H: Hypergraph, edge_ids: Iterable[int]) -> "Matching":
        ids = frozenset(edge_ids)
        es = [H.edge(i) for i in ids]
        return cls(ids, sum(e.weight for e in es), sum(e.size for e in es))

    def __len__(self):
        return len(self.edges)

    def ids(self) -> tuple:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class MatchingReport:
    ok: bool
    weight: int
    served: int
    conflict: Optional[tuple] = None
    shared: Optional[str] = None


def validate_matching(H: Hypergraph, M) -> MatchingReport:
    """Check pairwise disjointness and recompute weight/served.

    ``M`` is a :class:`Matching` or an iterable of edge ids. Unknown ids
    raise ``KeyError``. On a conflict, the first intersecting pair (in id
    order) is reported.
    """
    ids = sorted(M.edges if isinstance(M, Matching) else M)
    es = [H.edge(i) for i in ids]
    weight = sum(e.weight for e in es)
    served = sum(e.size for e in es)
    drivers: dict = {}
    riders: dict = {}
    for e in es:
        if e.driver in drivers:
            return MatchingReport(False, weight, served, (drivers[e.driver], e.id), f"driver {e.driver}")
        drivers[e.driver] = e.id
        for r in sorted(e.passengers):
            if r in riders:
                return MatchingReport(False, weight, served, (riders[r], e.id), f"passenger {r}")
            riders[r] = e.id
    if isinstance(M, Matching) and (M.weight != weight or M.served != served):
        return MatchingReport(False, weight, served, None, "cached weight/served mismatch")
    return MatchingReport(True, weight, served)
