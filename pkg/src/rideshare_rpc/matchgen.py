"""Feasible match enumeration with shortest feasible paths.

Timeline rules: the driver leaves its origin at its earliest departure,
may wait at a pickup until the rider's earliest departure, and all waiting
counts toward durations and deadlines. A rider's duration is measured from
pickup to dropoff; the driver's from departure to arrival. The detour
limit bounds the driver's total time by direct time + detour.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from .model import Driver, Passenger
from .network import RoadNetwork

PICKUP, DROPOFF = 0, 1


@dataclass(frozen=True)
class GenCaps:
    max_base_per_driver: int = 100
    max_total_per_driver: int = 500
    max_base_per_passenger: int = 20
    tau: Optional[float] = None

    def __post_init__(self):
        if min(self.max_base_per_driver, self.max_total_per_driver, self.max_base_per_passenger) < 1:
            raise ValueError("caps must be >= 1")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")

    def tau_for(self, drivers) -> float:
        """Explicit ``tau``, else 0.6 when every driver has capacity 1 and 0.8 otherwise."""
        if self.tau is not None:
            return self.tau
        return 0.8 if any(d.capacity > 1 for d in drivers) else 0.6


@dataclass(frozen=True)
class Route:
    """A feasible match before pricing."""

    driver: int
    passengers: tuple
    order: tuple
    path: tuple
    distance: int


def candidate_pair(driver: Driver, passenger: Passenger, network: RoadNetwork, tau: float) -> bool:
    """Cheap straight-line screen before any shortest-path work."""
    reach = driver.max_duration * network.speed_between(driver.origin, driver.destination)
    sl = network.straight_line
    est = tau * float(sl(driver.origin, passenger.origin) + sl(passenger.origin, passenger.destination)
                      + sl(passenger.destination, driver.destination))
    return reach >= est


def shortest_feasible_path(driver: Driver, riders: Sequence[Passenger], network: RoadNetwork) -> Optional[Route]:
    """Minimum-distance feasible pickup/dropoff order, or ``None``.

    Depth-first over interleavings in ascending ``(passenger, kind)`` token
    order with distance bound pruning, so among equal distances the
    lexicographically smallest order wins.
    """
    if not riders:
        raise ValueError("need at least one passenger")
    if len(riders) > driver.capacity:
        return None
    riders = sorted(riders, key=lambda r: r.id)
    k = len(riders)
    # local index: 0 driver origin, 1 driver destination, 2+2j rider origin, 3+2j rider destination
    locs = [driver.origin, driver.destination]
    for r in riders:
        locs += [r.origin, r.destination]
    ix = np.ix_(locs, locs)
    D = network.dist[ix].tolist()
    T = network.time[ix].tolist()
    direct = T[0][1]
    alpha = driver.earliest_departure
    best = [None, None]  # distance, order
    picked = [None] * k
    order = []

    spend = min(driver.max_duration, direct + driver.detour_limit)

    def rec(cur, t, dist, remaining):
        if best[0] is not None and dist + D[cur][1] >= best[0]:
            return
        # travel times are nonnegative, so a deadline already missed stays missed
        if t > driver.latest_arrival or t - alpha > spend:
            return
        for j in range(k):
            pj = picked[j]
            if pj is None:
                if t > riders[j].latest_arrival:
                    return
            elif pj >= 0 and (t > riders[j].latest_arrival or t - pj > riders[j].max_duration):
                return
        if remaining == 0:
            end = t + T[cur][1]
            if end <= driver.latest_arrival and end - alpha <= driver.max_duration \
                    and end - alpha <= direct + driver.detour_limit:
                best[0], best[1] = dist + D[cur][1], tuple(order)
            return
        for j in range(k):
            r = riders[j]
            if picked[j] is None:
                loc = 2 + 2 * j
                nt = max(t + T[cur][loc], r.earliest_departure)
                picked[j] = nt
                order.append((r.id, PICKUP))
                rec(loc, nt, dist + D[cur][loc], remaining)
                order.pop()
                picked[j] = None
            elif picked[j] >= 0:
                loc = 3 + 2 * j
                nt = t + T[cur][loc]
                if nt > r.latest_arrival or nt - picked[j] > r.max_duration:
                    continue
                p = picked[j]
                picked[j] = -1.0
                order.append((r.id, DROPOFF))
                rec(loc, nt, dist + D[cur][loc], remaining - 1)
                order.pop()
                picked[j] = p

    rec(0, float(driver.earliest_departure), 0, k)
    if best[0] is None:
        return None
    return _route(driver, best[1], riders, best[0])


def _route(driver, order, riders, distance) -> Route:
    loc = {}
    for r in riders:
        loc[(r.id, PICKUP)] = r.origin
        loc[(r.id, DROPOFF)] = r.destination
    path = (driver.origin,) + tuple(loc[tok] for tok in order) + (driver.destination,)
    return Route(driver.id, tuple(sorted(r.id for r in riders)), tuple(order), path, int(distance))


def check_route(route: Route, driver: Driver, riders: dict, network: RoadNetwork) -> list:
    """Re-simulate a route from scratch and list every violated constraint.

    Independent of the search code: walks the stop list once with the
    network's matrices and re-derives every time and distance.
    """
    problems = []
    order = list(route.order)
    path = list(route.path)
    if path[0] != driver.origin or path[-1] != driver.destination:
        problems.append("path does not start/end at the driver's origin/destination")
    if len(path) != len(order) + 2:
        problems.append("path and visiting order lengths differ")
        return problems
    ids = sorted({r for r, _ in order})
    if ids != sorted(route.passengers):
        problems.append("visiting order does not cover the passenger set")
    if len(ids) > driver.capacity:
        problems.append("capacity exceeded")
    if sorted(order) != sorted((r, kind) for r in ids for kind in (PICKUP, DROPOFF)):
        problems.append("each passenger needs exactly one pickup and one dropoff")
        return problems
    clock = float(driver.earliest_departure)
    total = 0
    board = {}
    onboard = 0
    for i, (r, kind) in enumerate(order):
        a, b = path[i], path[i + 1]
        clock = clock + float(network.time[a, b])
        total += int(network.dist[a, b])
        p = riders[r]
        if kind == PICKUP:
            if b != p.origin:
                problems.append(f"pickup of {r} at the wrong location")
            clock = max(clock, p.earliest_departure)
            board[r] = clock
            onboard += 1
            if onboard > driver.capacity:
                problems.append("capacity exceeded on board")
        else:
            if b != p.destination:
                problems.append(f"dropoff of {r} at the wrong location")
            if r not in board:
                problems.append(f"passenger {r} dropped before pickup")
                continue
            if clock > p.latest_arrival:
                problems.append(f"passenger {r} arrives late")
            if clock - board[r] > p.max_duration:
                problems.append(f"passenger {r} rides too long")
            onboard -= 1
    clock = clock + float(network.time[path[-2], path[-1]])
    total += int(network.dist[path[-2], path[-1]])
    spent = clock - driver.earliest_departure
    if clock > driver.latest_arrival:
        problems.append("driver arrives late")
    if spent > driver.max_duration:
        problems.append("driver exceeds max duration")
    if spent > float(network.time[driver.origin, driver.destination]) + driver.detour_limit:
        problems.append("driver exceeds detour limit")
    if total != route.distance:
        problems.append(f"distance {route.distance} != recomputed {total}")
    return problems


def all_orders(ids: Sequence[int]):
    """Every pickup/dropoff interleaving with pickups before dropoffs."""
    tokens = [(r, kind) for r in sorted(ids) for kind in (PICKUP, DROPOFF)]
    seen = set()
    for perm in permutations(tokens):
        if perm in seen:
            continue
        seen.add(perm)
        if all(perm.index((r, PICKUP)) < perm.index((r, DROPOFF)) for r in ids):
            yield perm


# --- vectorized screens for base matches and pairs -------------------------

_PAIR_ORDERS = (
    # a < b; listed in ascending token order
    (("a", 0), ("a", 1), ("b", 0), ("b", 1)),
    (("a", 0), ("b", 0), ("a", 1), ("b", 1)),
    (("a", 0), ("b", 0), ("b", 1), ("a", 1)),
    (("b", 0), ("a", 0), ("a", 1), ("b", 1)),
    (("b", 0), ("a", 0), ("b", 1), ("a", 1)),
    (("b", 0), ("b", 1), ("a", 0), ("a", 1)),
)


class _Riders:
    """Column arrays over the batch's passengers (sorted by id)."""

    def __init__(self, passengers: Sequence[Passenger]):
        self.items = sorted(passengers, key=lambda p: p.id)
        self.ids = np.array([p.id for p in self.items], dtype=np.int64)
        self.o = np.array([p.origin for p in self.items], dtype=np.int64)
        self.d = np.array([p.destination for p in self.items], dtype=np.int64)
        self.alpha = np.array([p.earliest_departure for p in self.items], dtype=np.float64)
        self.late = np.array([p.latest_arrival for p in self.items], dtype=np.float64)
        self.dur = np.array([p.max_duration for p in self.items], dtype=np.float64)


def _simulate(driver, network, sequence, cols):
    """Vectorized timeline for one fixed order; returns (feasible, distance).

    ``sequence`` is a list of ``(key, kind)`` tokens and ``cols[key]`` an
    index array into the rider columns. Arithmetic mirrors the scalar code
    step by step so both give bit-identical float times.
    """
    R = cols["riders"]
    T, D = network.time, network.dist
    size = len(next(iter(v for k, v in cols.items() if k != "riders")))
    cur = np.full(size, driver.origin, dtype=np.int64)
    t = np.full(size, float(driver.earliest_departure))
    dist = np.zeros(size, dtype=np.int64)
    ok = np.ones(size, dtype=bool)
    board = {}
    for key, kind in sequence:
        idx = cols[key]
        nxt = R.o[idx] if kind == PICKUP else R.d[idx]
        t = t + T[cur, nxt]
        dist = dist + D[cur, nxt]
        if kind == PICKUP:
            t = np.maximum(t, R.alpha[idx])
            board[key] = t
        else:
            ok &= (t <= R.late[idx]) & (t - board[key] <= R.dur[idx])
        cur = nxt
    t = t + T[cur, driver.destination]
    dist = dist + D[cur, driver.destination]
    spent = t - driver.earliest_departure
    direct = float(T[driver.origin, driver.destination])
    ok &= (t <= driver.latest_arrival) & (spent <= driver.max_duration) & (spent <= direct + driver.detour_limit)
    return ok, dist


def _base_screen(driver, riders: _Riders, network, tau):
    """Indices of riders forming a feasible base match with ``driver``."""
    sl = network.straight_line
    reach = driver.max_duration * network.speed_between(driver.origin, driver.destination)
    est = tau * (sl(driver.origin, riders.o) + sl(riders.o, riders.d) + sl(riders.d, driver.destination))
    cand = np.flatnonzero(reach >= est)
    if not len(cand):
        return cand, np.zeros(0, dtype=np.int64)
    ok, dist = _simulate(driver, network, [("a", PICKUP), ("a", DROPOFF)], {"riders": riders, "a": cand})
    return cand[ok], dist[ok]


def _pair_screen(driver, riders: _Riders, network, partners, limit=None):
    """Feasible pairs among ``partners`` (rider indices), lexicographic, at most ``limit``."""
    if len(partners) < 2:
        return []
    ia, ib = np.triu_indices(len(partners), k=1)
    a, b = partners[ia], partners[ib]
    cols = {"riders": riders, "a": a, "b": b}
    best_dist = np.full(len(a), np.iinfo(np.int64).max)
    best_order = np.full(len(a), -1)
    for k, seq in enumerate(_PAIR_ORDERS):
        ok, dist = _simulate(driver, network, seq, cols)
        better = ok & (dist < best_dist)
        best_dist = np.where(better, dist, best_dist)
        best_order = np.where(better, k, best_order)
    out = []
    for i in np.flatnonzero(best_order >= 0)[:limit]:
        ra, rb = riders.items[a[i]], riders.items[b[i]]
        seq = _PAIR_ORDERS[best_order[i]]
        order = tuple(((ra if key == "a" else rb).id, kind) for key, kind in seq)
        out.append(_route(driver, order, (ra, rb), best_dist[i]))
    return out


def _batch_sfp(driver, riders: _Riders, network, keys, index_of, limit=None):
    """Compiled SFP over many rider sets of equal size; feasible ones in input order."""
    if not keys:
        return []
    from ._kernels import sfp_batch

    sets = np.array([[index_of[p] for p in key] for key in keys], dtype=np.int64)
    direct = float(network.time[driver.origin, driver.destination])
    spend = float(min(driver.max_duration, direct + driver.detour_limit))
    best, orders = sfp_batch(network.dist, network.time, driver.origin, driver.destination,
                             float(driver.earliest_departure), float(driver.latest_arrival), spend,
                             sets, riders.o, riders.d, riders.alpha, riders.late, riders.dur)
    out = []
    for i in np.flatnonzero(best >= 0)[:limit]:
        members = [riders.items[j] for j in sets[i]]
        order = tuple((members[c // 2].id, c % 2) for c in orders[i].tolist())
        out.append(_route(driver, order, members, best[i]))
    return out


def enumerate_matches(drivers: Sequence[Driver], passengers: Sequence[Passenger],
                      network: RoadNetwork, caps: GenCaps = GenCaps(), vectorized: bool = True) -> list:
    """Feasible matches of a batch as :class:`Route` objects.

    Phase 1 keeps, per driver, the first ``max_base_per_driver`` base
    matches by passenger id, then a reconciliation pass keeps, per
    passenger, the ``max_base_per_passenger`` lowest driver ids. Phase 2
    grows sets one passenger at a time: a set of size k+1 is tried only if
    one of its size-k subsets is feasible and the new passenger is a base
    partner of the driver. Stops at ``max_total_per_driver`` per driver.
    Output is grouped by driver id, then by set size, then generation order.
    """
    drivers = sorted(drivers, key=lambda d: d.id)
    tau = caps.tau_for(drivers)
    riders = _Riders(passengers)
    # base candidates as (passenger, route or distance); routes are built after the caps
    base = {}
    for drv in drivers:
        if vectorized:
            idx, dist = _base_screen(drv, riders, network, tau)
            cands = [(riders.items[i], int(d)) for i, d in
                     zip(idx[: caps.max_base_per_driver].tolist(), dist[: caps.max_base_per_driver].tolist())]
        else:
            cands = []
            for p in riders.items:
                if len(cands) >= caps.max_base_per_driver:
                    break
                if candidate_pair(drv, p, network, tau):
                    r = shortest_feasible_path(drv, [p], network)
                    if r is not None:
                        cands.append((p, r))
        base[drv.id] = cands

    per_passenger: dict = {}
    for drv in drivers:
        kept = []
        for p, r in base[drv.id]:
            if per_passenger.get(p.id, 0) < caps.max_base_per_passenger:
                per_passenger[p.id] = per_passenger.get(p.id, 0) + 1
                if not isinstance(r, Route):
                    r = Route(drv.id, (p.id,), ((p.id, PICKUP), (p.id, DROPOFF)),
                              (drv.origin, p.origin, p.destination, drv.destination), r)
                kept.append(r)
        base[drv.id] = kept

    by_id = {p.id: p for p in riders.items}
    index_of = {p.id: i for i, p in enumerate(riders.items)}
    out = []
    for drv in drivers:
        routes = list(base[drv.id])
        room = caps.max_total_per_driver
        routes = routes[:room]
        if drv.capacity >= 2 and len(routes) < room:
            partners = [r.passengers[0] for r in routes]
            level = routes
            seen = set()
            for size in range(2, drv.capacity + 1):
                nxt = []
                if size == 2 and vectorized:
                    pidx = np.array([index_of[p] for p in partners], dtype=np.int64)
                    nxt = _pair_screen(drv, riders, network, pidx, room - len(routes))
                elif vectorized:
                    keys = []
                    for s in level:
                        for pid in partners:
                            if pid in s.passengers:
                                continue
                            key = tuple(sorted(s.passengers + (pid,)))
                            if key not in seen:
                                seen.add(key)
                                keys.append(key)
                    nxt = _batch_sfp(drv, riders, network, keys, index_of, room - len(routes))
                else:
                    for s in level:
                        for pid in partners:
                            if len(routes) + len(nxt) >= room:
                                break
                            if pid in s.passengers:
                                continue
                            key = tuple(sorted(s.passengers + (pid,)))
                            if key in seen:
                                continue
                            seen.add(key)
                            r = shortest_feasible_path(drv, [by_id[q] for q in key], network)
                            if r is not None:
                                nxt.append(r)
                routes += nxt
                level = nxt
                if not level or len(routes) >= room:
                    break
        out.extend(routes)
    return out
