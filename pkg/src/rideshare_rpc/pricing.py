"""Uber-style revenue, vehicle cost and profit of a feasible match.

All public results are integer cents. Fare arithmetic runs in floats and is
rounded once per revenue and once per cost (half away from zero).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from fractions import Fraction
from typing import Mapping, Sequence

from .model import VehicleType, round_cents

METERS_PER_MILE = 1609.344
PEAK_HOURS = frozenset([7, 8, 9, 16, 17, 18, 19])


def is_peak(hour: int) -> bool:
    return hour in PEAK_HOURS


@dataclass(frozen=True)
class FeeSchedule:
    """Fare components in cents: base fare, per minute, per mile."""

    base_fare: float = 180
    per_minute: float = 27
    per_mile: float = 80
    booking_min: float = 100
    booking_max: float = 1000


FEES = FeeSchedule()


def booking_fee(miles: float, fees: FeeSchedule = FEES) -> int:
    """Booking fee in cents; kept by the platform, never part of driver revenue."""
    if miles < 0:
        raise ValueError("distance must be nonnegative")
    dollars = min(max(1.0, 1.0 + 0.25 * (miles - 2)), fees.booking_max / 100)
    return round_cents(max(dollars * 100, fees.booking_min))


@lru_cache(maxsize=None)
def discount_rate(dp: int) -> Fraction:
    """Shared-ride fare factor for a rider who meets ``dp`` co-riders."""
    if dp < 0:
        raise ValueError("dp must be nonnegative")
    return max(1 - Fraction(dp, 5), Fraction(1, 5))


@lru_cache(maxsize=None)
def take_rate_interval(omega) -> tuple:
    omega = Fraction(omega)
    return max(Fraction(1, 20), omega / 5), max(Fraction(1, 10), omega / 4)


def take_rate(omega, rng) -> float:
    """Platform share, uniform on the discount-dependent interval."""
    lo, hi = _float_interval(omega)
    return float(rng.uniform(lo, hi))


@lru_cache(maxsize=None)
def _float_interval(omega) -> tuple:
    lo, hi = take_rate_interval(omega)
    return float(lo), float(hi)


@dataclass(frozen=True)
class CostSetting:
    """Per-mile vehicle cost plus scenario uplifts (all in cents per mile).

    ``fuel_uplift`` is ``(non-peak, peak)`` as fractions of the vehicle cost;
    ``overhead`` is an extra fraction of the un-uplifted vehicle cost.
    """

    name: str = "base"
    vehicle_cost: Mapping = field(default_factory=lambda: {
        VehicleType.SMALL_SEDAN: 12.51,
        VehicleType.MEDIUM_SEDAN: 14.37,
        VehicleType.MEDIUM_SUV: 18.89,
    })
    fuel_uplift: tuple = (0.0, 0.0)
    operating_cost: Mapping = field(default_factory=dict)
    overhead: float = 0.0

    def uplift(self, peak: bool) -> float:
        return self.fuel_uplift[1 if peak else 0]


# maintenance + depreciation, cents per mile; SUV reuses the medium sedan row
OPERATING_COST = {
    VehicleType.SMALL_SEDAN: 8.87 + 18.51,
    VehicleType.MEDIUM_SEDAN: 10.64 + 25.05,
    VehicleType.MEDIUM_SUV: 10.64 + 25.05,
}

BASE = CostSetting()
COST_SETTINGS = {"base": BASE}
for _k in range(1, 7):
    COST_SETTINGS[f"S{_k}"] = replace(
        BASE, name=f"S{_k}", fuel_uplift=(0.2 * _k, 0.2 * _k + 0.2),
        operating_cost=dict(OPERATING_COST),
    )


def cost_setting(name: str) -> CostSetting:
    try:
        return COST_SETTINGS[name if name == "base" else name.upper()]
    except KeyError:
        raise ValueError(f"unknown cost setting {name!r}; choose from {sorted(COST_SETTINGS)}") from None


@dataclass(frozen=True)
class RideContext:
    """Everything the revenue formula needs about one route.

    ``legs[a]`` is ``(meters, seconds)`` from stop ``a`` to stop ``a + 1``
    of the path (stop 0 is the driver origin). ``spans[r]`` is the
    ``(pickup stop, dropoff stop)`` pair of rider ``r``.
    """

    legs: tuple
    spans: Mapping
    take_rate: Mapping
    surge: Mapping
    tip: Mapping
    onboard: tuple = ()
    co_riders: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.spans:
            raise ValueError("ride has no passengers")
        onboard = [0] * len(self.legs)
        for r, (p, q) in self.spans.items():
            if not 0 < p < q <= len(self.legs):
                raise ValueError(f"span of passenger {r} does not fit the path")
            for a in range(p, q):
                onboard[a] += 1
        object.__setattr__(self, "onboard", tuple(onboard))
        object.__setattr__(self, "co_riders", co_riders(self.spans))

    def discount(self, r) -> Fraction:
        return discount_rate(self.co_riders[r])


def co_riders(spans: Mapping) -> dict:
    """Number of other riders whose time in the car overlaps each rider's."""
    return {r: sum(1 for s, (p2, q2) in spans.items() if s != r and p2 < q and p < q2)
            for r, (p, q) in spans.items()}


def spans_from_order(order: Sequence) -> dict:
    """Map each rider to its (pickup, dropoff) stop indices in the path."""
    spans: dict = {}
    for pos, (r, kind) in enumerate(order, start=1):
        p, q = spans.get(r, (None, None))
        spans[r] = (pos, q) if kind == 0 else (p, pos)
    return spans


def ride_context(order, legs, passengers: Mapping, take_rates: Mapping) -> RideContext:
    if len(legs) != len(order) + 1:
        raise ValueError("legs do not match the visiting order")
    spans = spans_from_order(order)
    return RideContext(
        legs=tuple(legs),
        spans=spans,
        take_rate={r: take_rates[r] for r in spans},
        surge={r: passengers[r].surge_factor for r in spans},
        tip={r: passengers[r].tip_expectation for r in spans},
    )


def match_revenue(ctx: RideContext, fees: FeeSchedule = FEES) -> int:
    total = 0.0
    for r, (p, q) in sorted(ctx.spans.items()):
        fare = fees.base_fare
        for a in range(p, q):
            meters, seconds = ctx.legs[a]
            fare += (fees.per_minute * seconds / 60 + fees.per_mile * meters / METERS_PER_MILE) / ctx.onboard[a]
        share = (1 - ctx.take_rate[r]) * float(ctx.discount(r)) * ctx.surge[r]
        total += share * fare + ctx.tip[r]
    return round_cents(total)


def match_cost(meters: float, vehicle: VehicleType, setting: CostSetting = BASE, peak: bool = False) -> int:
    miles = meters / METERS_PER_MILE
    vehicle = VehicleType(vehicle)
    base = miles * setting.vehicle_cost[vehicle]
    op = miles * setting.operating_cost.get(vehicle, 0.0)
    return round_cents(base * (1 + setting.uplift(peak)) + op + base * setting.overhead)


def match_profit(ctx: RideContext, meters: float, vehicle: VehicleType,
                 fees: FeeSchedule = FEES, setting: CostSetting = BASE, peak: bool = False):
    """Return ``(revenue, cost, profit)`` in cents; profit may be negative."""
    rev = match_revenue(ctx, fees)
    cost = match_cost(meters, vehicle, setting, peak)
    return rev, cost, rev - cost
