"""Synthetic batches of drivers and passengers, and the instance JSON format.

The city is a jittered grid split into square regions. Demand follows a
fixed daily profile; origin/destination regions are drawn from a gravity
model. Every random draw for interval ``i`` comes from a stream seeded by
``(seed, i)``, so intervals can be generated in any order or in parallel.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .matchgen import GenCaps, enumerate_matches
from .model import Driver, FeasibleMatch, Passenger, VehicleType
from .network import RoadNetwork, grid_city
from .pricing import (
    BASE, FEES, CostSetting, FeeSchedule, co_riders, discount_rate, is_peak, match_profit,
    ride_context, spans_from_order, take_rate,
)

METERS_PER_MILE = 1609.344
_SEDANS = (VehicleType.SMALL_SEDAN, VehicleType.MEDIUM_SEDAN)


@dataclass(frozen=True)
class GenConfig:
    """Knobs of the synthetic day. Speeds are m/s, times seconds, money cents.

    Speed, surge and tip defaults are placeholders, not fitted values.
    """

    seed: int = 0
    variant: str = "rpc1"
    grid_size: int = 30
    spacing: float = 800.0
    regions_per_side: int = 5
    start_hour: int = 6
    num_intervals: int = 72
    interval_seconds: int = 900
    peak_passengers: int = 1000
    offpeak_passengers: int = 450
    passenger_counts: Optional[tuple] = None
    min_trip_meters: int = 2414
    rpc1_ratio: tuple = (0.9, 1.1)
    rpcplus_peak_ratio: float = 0.25
    rpcplus_offpeak_ratio: tuple = (1 / 3, 1 / 2)
    suv_share: tuple = (0.10, 0.05)
    sedan_capacity: tuple = (1, 3)
    suv_capacity: tuple = (1, 5)
    detour_factor: tuple = (1.2, 1.4)
    detour_floor: int = 2700
    driver_late_factor: tuple = (1.0, 1.25)
    passenger_late_factor: tuple = (2.0, 3.0)
    passenger_duration_factor: tuple = (1.5, 2.0)
    speed: tuple = (7.0, 5.0)
    speed_jitter: float = 0.1
    surge_peak: tuple = (1.0, 1.5)
    tip_probability: float = 0.3
    tip_per_mile: int = 50
    tip_cap: int = 500

    def __post_init__(self):
        if self.variant not in ("rpc1", "rpcplus"):
            raise ValueError(f"variant must be rpc1 or rpcplus, got {self.variant!r}")
        lo, hi = self.rpc1_ratio
        if not 0.9 <= lo <= hi <= 1.1:
            raise ValueError("rpc1_ratio must lie within [0.9, 1.1]")
        lo, hi = self.rpcplus_offpeak_ratio
        if not 1 / 3 - 1e-12 <= lo <= hi <= 0.5 + 1e-12:
            raise ValueError("rpcplus_offpeak_ratio must lie within [1/3, 1/2]")
        if self.num_intervals < 1 or self.interval_seconds < 1:
            raise ValueError("need at least one interval of positive length")
        if self.start_hour < 0 or self.start_hour * 3600 + self.num_intervals * self.interval_seconds > 24 * 3600:
            raise ValueError("intervals run past midnight")
        if self.passenger_counts is not None and len(self.passenger_counts) != self.num_intervals:
            raise ValueError("passenger_counts must have one entry per interval")
        if min(self.sedan_capacity[0], self.suv_capacity[0]) < 1:
            raise ValueError("capacities must be >= 1")

    @classmethod
    def from_json(cls, obj: dict) -> "GenConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        obj = {k: tuple(v) if isinstance(v, list) else v for k, v in obj.items()}
        return cls(**obj)

    def hour(self, interval: int) -> int:
        return self.start_hour + interval * self.interval_seconds // 3600

    def passengers_in(self, interval: int) -> int:
        if self.passenger_counts is not None:
            return int(self.passenger_counts[interval])
        h = self.hour(interval)
        if is_peak(h):
            return self.peak_passengers
        if h >= 21:
            return int(self.offpeak_passengers * 0.6)
        return self.offpeak_passengers


@dataclass
class Instance:
    interval: int
    hour: int
    peak: bool
    network: RoadNetwork
    drivers: list
    passengers: list
    matches: Optional[list] = None
    variant: str = "rpc1"

    @property
    def capacity(self) -> dict:
        return {d.id: d.capacity for d in self.drivers}

    def passenger_map(self) -> dict:
        return {p.id: p for p in self.passengers}

    def driver_map(self) -> dict:
        return {d.id: d for d in self.drivers}

    def to_json(self) -> dict:
        obj = {
            "interval": {"id": self.interval, "hour": self.hour, "peak": self.peak},
            "variant": self.variant,
            "network": self.network.to_json(),
            "drivers": [_trip_json(d) for d in self.drivers],
            "passengers": [_trip_json(p) for p in self.passengers],
        }
        if self.matches is not None:
            obj["matches"] = [match_to_json(m) for m in self.matches]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        iv = obj["interval"]
        matches = obj.get("matches")
        return cls(
            interval=iv["id"], hour=iv["hour"], peak=iv["peak"],
            network=RoadNetwork.from_json(obj["network"]),
            drivers=[Driver(**d) for d in obj["drivers"]],
            passengers=[Passenger(**p) for p in obj["passengers"]],
            matches=None if matches is None else [match_from_json(m) for m in matches],
            variant=obj.get("variant", "rpc1"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "Instance":
        return cls.from_json(json.loads(Path(path).read_text()))


def _trip_json(t) -> dict:
    obj = asdict(t)
    if "vehicle_type" in obj:
        obj["vehicle_type"] = VehicleType(obj["vehicle_type"]).value
    return obj


def match_to_json(m: FeasibleMatch) -> dict:
    return {
        "driver": m.driver,
        "passengers": list(m.passengers),
        "path": list(m.path),
        "order": [list(t) for t in m.order],
        "distance": m.distance,
        "revenue": m.revenue,
        "cost": m.cost,
        "profit": m.profit,
        "take_rates": list(m.take_rates),
    }


def match_from_json(obj: dict) -> FeasibleMatch:
    return FeasibleMatch(
        driver=obj["driver"],
        passengers=tuple(obj["passengers"]),
        path=tuple(obj.get("path", ())),
        order=tuple(tuple(t) for t in obj.get("order", ())),
        distance=obj.get("distance", 0),
        revenue=obj.get("revenue", obj["profit"] + obj.get("cost", 0)),
        cost=obj.get("cost", 0),
        profit=obj["profit"],
        take_rates=tuple(obj.get("take_rates", ())),
    )


_CITY_CACHE: dict = {}


def city(config: GenConfig) -> RoadNetwork:
    key = (config.grid_size, config.spacing, config.regions_per_side, config.seed)
    if key not in _CITY_CACHE:
        _CITY_CACHE[key] = grid_city(config.grid_size, config.spacing, config.regions_per_side,
                                     seed=config.seed)
    return _CITY_CACHE[key]


def _gravity(config: GenConfig, nreg: int) -> np.ndarray:
    rng = np.random.default_rng([config.seed, 0xC17])
    w = rng.lognormal(0.0, 0.6, size=nreg)
    od = np.outer(w, w)
    return od / od.sum()


def _speed_table(config: GenConfig, nreg: int, interval: int, peak: bool) -> np.ndarray:
    rng = np.random.default_rng([config.seed, interval, 0x5BD])
    base = config.speed[1] if peak else config.speed[0]
    jitter = rng.uniform(1 - config.speed_jitter, 1 + config.speed_jitter, size=(nreg, nreg))
    return np.round(base * jitter, 2)


def _rng(config: GenConfig, interval: int):
    return np.random.default_rng([config.seed, interval])


def _trip_endpoints(rng, net, region_nodes, x, y, min_m):
    """Random origin in region x and destination in region y, at least ``min_m`` apart."""
    o = d = None
    for _ in range(20):
        o = int(rng.choice(region_nodes[x]))
        d = int(rng.choice(region_nodes[y]))
        if net.dist[o, d] >= min_m:
            break
    return o, d


def generate_instance(config: GenConfig, interval: int) -> Instance:
    """Draw the drivers and passengers of one interval."""
    if not 0 <= interval < config.num_intervals:
        raise ValueError(f"interval {interval} out of range")
    rng = _rng(config, interval)
    hour = config.hour(interval)
    peak = is_peak(hour)
    geo = city(config)
    nreg = geo.num_regions
    net = geo.with_speed(_speed_table(config, nreg, interval, peak))
    region_nodes = [np.flatnonzero(net.region == x) for x in range(nreg)]
    T, D = net.time, net.dist

    n_pass = config.passengers_in(interval)
    od = rng.multinomial(n_pass, _gravity(config, nreg).ravel()).reshape(nreg, nreg)
    passengers = []
    for x in range(nreg):
        for y in range(nreg):
            for _ in range(od[x, y]):
                o, d = _trip_endpoints(rng, net, region_nodes, x, y, config.min_trip_meters)
                sp_time = float(T[o, d])
                alpha = int(rng.integers(0, config.interval_seconds))
                late = alpha + math.ceil(rng.uniform(*config.passenger_late_factor) * sp_time)
                dur = math.ceil(rng.uniform(*config.passenger_duration_factor) * sp_time)
                surge = round(float(rng.uniform(*config.surge_peak)), 2) if peak else 1.0
                miles = round(float(D[o, d]) / METERS_PER_MILE)
                tip = round(config.tip_probability * min(config.tip_per_mile * miles, config.tip_cap))
                passengers.append(Passenger(len(passengers), o, d, alpha, max(late, alpha + 1),
                                            max(dur, 1), surge, int(tip)))

    from_region = od.sum(axis=1)
    drivers = []
    suv_share = config.suv_share[1] if peak else config.suv_share[0]
    for x in range(nreg):
        nx = int(from_region[x])
        if nx == 0:
            continue
        if config.variant == "rpc1":
            count = math.ceil(rng.uniform(*config.rpc1_ratio) * nx)
        elif peak:
            count = math.ceil(nx * config.rpcplus_peak_ratio)
        else:
            lo = math.ceil(nx * config.rpcplus_offpeak_ratio[0])
            hi = math.ceil(nx * config.rpcplus_offpeak_ratio[1])
            count = int(rng.integers(lo, hi + 1))
        dest_p = od[x] / nx
        for _ in range(count):
            y = int(rng.choice(nreg, p=dest_p))
            o, d = _trip_endpoints(rng, net, region_nodes, x, y, config.min_trip_meters)
            sp_time = float(T[o, d])
            spd = net.speed_between(o, d)
            alpha = int(rng.integers(0, config.interval_seconds))
            z = math.ceil(max(rng.uniform(*config.detour_factor) * float(D[o, d]) / spd, config.detour_floor))
            late = alpha + math.ceil(rng.uniform(*config.driver_late_factor) * (sp_time + z))
            max_dur = math.ceil(sp_time + z)
            if config.variant == "rpc1":
                vt, cap = _SEDANS[int(rng.integers(2))], 1
            elif rng.random() < suv_share:
                vt, cap = VehicleType.MEDIUM_SUV, int(rng.integers(config.suv_capacity[0], config.suv_capacity[1] + 1))
            else:
                vt = _SEDANS[int(rng.integers(2))]
                cap = int(rng.integers(config.sedan_capacity[0], config.sedan_capacity[1] + 1))
            drivers.append(Driver(len(drivers), o, d, cap, alpha, late, z, max_dur, vt))
    return Instance(interval, hour, peak, net, drivers, passengers, variant=config.variant)


def price_routes(routes, instance: Instance, seed: int = 0, fees: FeeSchedule = FEES,
                 setting: CostSetting = BASE) -> list:
    """Turn routes into priced :class:`FeasibleMatch` objects.

    Take-rates come from a per-driver stream seeded by ``(seed, interval,
    driver)``, consumed in route order and passenger-id order.
    """
    riders = instance.passenger_map()
    drivers = instance.driver_map()
    net = instance.network
    streams: dict = {}
    out = []
    for r in routes:
        rng = streams.get(r.driver)
        if rng is None:
            rng = streams[r.driver] = np.random.default_rng([seed, instance.interval, 1, r.driver])
        legs = [(int(net.dist[a, b]), float(net.time[a, b])) for a, b in zip(r.path, r.path[1:])]
        dp = co_riders(spans_from_order(r.order))
        rates = {p: take_rate(discount_rate(dp[p]), rng) for p in sorted(r.passengers)}
        ctx = ride_context(r.order, legs, riders, rates)
        rev, cost, profit = match_profit(ctx, r.distance, drivers[r.driver].vehicle_type, fees, setting,
                                         instance.peak)
        out.append(FeasibleMatch(r.driver, r.passengers, r.path, r.order, r.distance, rev, cost, profit,
                                 tuple(rates[p] for p in r.passengers)))
    return out


def reprice(match: FeasibleMatch, instance: Instance, fees: FeeSchedule = FEES,
            setting: CostSetting = BASE):
    """Recompute ``(revenue, cost, profit)`` of a stored match from its take-rates."""
    net = instance.network
    legs = [(int(net.dist[a, b]), float(net.time[a, b])) for a, b in zip(match.path, match.path[1:])]
    rates = dict(zip(match.passengers, match.take_rates))
    ctx = ride_context(match.order, legs, instance.passenger_map(), rates)
    vehicle = instance.driver_map()[match.driver].vehicle_type
    return match_profit(ctx, match.distance, vehicle, fees, setting, instance.peak)


def generate_matches(instance: Instance, caps: GenCaps = GenCaps(), seed: int = 0,
                     fees: FeeSchedule = FEES, setting: CostSetting = BASE) -> list:
    routes = enumerate_matches(instance.drivers, instance.passengers, instance.network, caps)
    return price_routes(routes, instance, seed, fees, setting)
