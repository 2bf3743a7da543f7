"""Batch runner: targets, solving, per-interval reports, CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .flow import solve_rpc1_exact
from .greedy import greedy_rpc1, max_weight_matching
from .instance import GenConfig, Instance, generate_instance, generate_matches
from .ls2 import ls2, profit_target_bound, simple_greedy
from .matchgen import GenCaps
from .model import Hypergraph, Matching, build_hypergraph, split_by_sign, validate_matching
from .oracle import brute_rp, brute_rpc1, brute_rpcplus
from .pricing import BASE, FEES, CostSetting, FeeSchedule

CSV_COLUMNS = ("interval", "algorithm", "target_cents", "served", "matches", "profit_cents",
               "negative_matches", "runtime_ms", "occupancy")

ALGORITHMS = {
    "rpc1": ("exactnf2", "greedy", "oracle"),
    "rpcplus": ("simplegreedy", "ls2", "oracle"),
    "rp": ("exactnf2", "simplegreedy", "oracle"),
}


@dataclass(frozen=True)
class Target:
    """How to pick the profit target of an interval.

    ``kind`` is ``"factor"`` (value times the seed weight, floored),
    ``"cents"`` (absolute), or ``"named"`` (``c1``, ``c2``, ``c3``).
    """

    kind: str = "named"
    value: object = "c2"

    def __post_init__(self):
        if self.kind not in ("factor", "cents", "named"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "named" and self.value not in ("c1", "c2", "c3"):
            raise ValueError(f"named target must be c1, c2 or c3, got {self.value!r}")

    @classmethod
    def parse(cls, text: str) -> "Target":
        """``c2``, ``0.8`` (factor) or ``1234c`` (cents)."""
        text = str(text).strip()
        if text in ("c1", "c2", "c3"):
            return cls("named", text)
        if text.endswith("c"):
            return cls("cents", int(text[:-1]))
        return cls("factor", float(text))

    def label(self) -> str:
        return {"named": str(self.value), "cents": f"{self.value}c", "factor": f"{self.value}"}[self.kind]


def _floor_factor(factor, w: int) -> int:
    return math.floor(Fraction(str(factor)) * w)


def seed_matching(H: Hypergraph, variant: str) -> Matching:
    """M′: max-weight matching for RPC1, simple greedy on Hplus for RPC+.

    RP uses the max-weight matching when the hypergraph is bipartite and
    simple greedy otherwise.
    """
    if variant == "rpcplus" or not H.is_bipartite():
        return simple_greedy(split_by_sign(H)[0])
    return max_weight_matching(H)


def resolve_target(target: Target, H: Hypergraph, M: Matching, variant: str, lam: int) -> int:
    if target.kind == "cents":
        return int(target.value)
    if target.kind == "factor":
        return _floor_factor(target.value, M.weight)
    if variant == "rpcplus":
        lb = min(profit_target_bound(H, M, lam), _floor_factor("0.6", M.weight))
        return {"c1": M.weight, "c2": (M.weight - lb) // 2 + lb, "c3": lb}[target.value]
    return _floor_factor({"c1": "1", "c2": "0.8", "c3": "0.6"}[target.value], M.weight)


def solve(H: Hypergraph, variant: str, algo: str, c: int, lam: int,
          seed: Optional[Matching] = None, aggressive: bool = False) -> Optional[Matching]:
    """Dispatch one solver; ``None`` means infeasible for the target."""
    if algo not in ALGORITHMS.get(variant, ()):
        raise ValueError(f"algorithm {algo!r} not available for variant {variant!r}")
    if variant == "rpc1":
        if algo == "exactnf2":
            return solve_rpc1_exact(H, c)
        if algo == "greedy":
            return greedy_rpc1(H, c, seed=seed)
        return brute_rpc1(H, c)
    if variant == "rpcplus":
        if algo == "simplegreedy":
            M = seed if seed is not None else simple_greedy(split_by_sign(H)[0])
            return M if M.weight >= c else None
        if algo == "ls2":
            return ls2(H, c, lam=lam, aggressive=aggressive, seed=seed)
        return brute_rpcplus(H, c)
    # RP ignores the target: report the most profitable assignment found
    if algo == "exactnf2":
        if not H.is_bipartite():
            raise ValueError("exact RP via flow needs a bipartite hypergraph; use the oracle")
        return max_weight_matching(H)
    if algo == "simplegreedy":
        return simple_greedy(split_by_sign(H)[0])
    return brute_rp(H)


@dataclass
class IntervalReport:
    interval: int
    algorithm: str
    target_cents: int
    feasible: bool
    served: int = 0
    matches: int = 0
    profit_cents: int = 0
    negative_matches: int = 0
    runtime_ms: float = 0.0
    drivers: int = 0

    @property
    def occupancy(self) -> float:
        if not self.drivers:
            return 0.0
        return (self.served + self.drivers) / self.drivers

    def row(self, timing: bool = False) -> list:
        head = [self.interval, self.algorithm, self.target_cents]
        if not self.feasible:
            return head + ["", "", "", "", f"{self.runtime_ms:.1f}" if timing else "", ""]
        return head + [self.served, self.matches, self.profit_cents, self.negative_matches,
                       f"{self.runtime_ms:.1f}" if timing else "", f"{self.occupancy:.6f}"]


def run_batch(instance: Instance, variant: str, algorithms: Sequence[str], target: Target = Target(),
              caps: GenCaps = GenCaps(), seed: int = 0, fees: FeeSchedule = FEES,
              setting: CostSetting = BASE, aggressive: bool = False) -> list:
    """Solve one interval with each algorithm; infeasibility is recorded, not raised."""
    matches = instance.matches
    if matches is None:
        matches = generate_matches(instance, caps, seed, fees, setting)
    H = build_hypergraph(matches, instance.capacity)
    lam = max((d.capacity for d in instance.drivers), default=1)
    M0 = seed_matching(H, variant)
    c = resolve_target(target, H, M0, variant, lam)
    reports = []
    for algo in algorithms:
        start = time.perf_counter()
        M = solve(H, variant, algo, c, lam, seed=M0 if algo in ("greedy", "simplegreedy", "ls2") else None,
                  aggressive=aggressive)
        elapsed = (time.perf_counter() - start) * 1000
        rep = IntervalReport(instance.interval, algo, c, M is not None, runtime_ms=elapsed,
                             drivers=len(instance.drivers))
        if M is not None:
            check = validate_matching(H, M)
            if not check.ok:
                raise AssertionError(f"{algo} returned an invalid matching: {check}")
            rep.served, rep.matches, rep.profit_cents = M.served, len(M.edges), M.weight
            rep.negative_matches = sum(1 for i in M.edges if H.edge(i).weight < 0)
        reports.append(rep)
    return reports


def emit_report(reports: Sequence[IntervalReport], path, timing: bool = False) -> dict:
    """Write ``path`` (CSV) and ``path`` with ``.json`` suffix (summary); return the summary.

    Runtimes vary between runs, so the CSV leaves ``runtime_ms`` blank
    unless ``timing`` is set; the summary always carries them.
    """
    path = Path(path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row(timing))
    path.write_text(buf.getvalue())
    summary = summarize(reports)
    path.with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def summarize(reports: Sequence[IntervalReport]) -> dict:
    out: dict = {}
    for r in reports:
        s = out.setdefault(r.algorithm, {
            "intervals": 0, "infeasible": 0, "served": 0, "matches": 0, "profit_cents": 0,
            "target_cents": 0, "negative_matches": 0, "runtime_ms": 0.0, "occupancy_mean": 0.0,
        })
        s["intervals"] += 1
        s["target_cents"] += r.target_cents
        s["runtime_ms"] += r.runtime_ms
        if not r.feasible:
            s["infeasible"] += 1
            continue
        s["served"] += r.served
        s["matches"] += r.matches
        s["profit_cents"] += r.profit_cents
        s["negative_matches"] += r.negative_matches
        s["occupancy_mean"] += r.occupancy
    for s in out.values():
        feasible = s["intervals"] - s["infeasible"]
        s["occupancy_mean"] = round(s["occupancy_mean"] / feasible, 6) if feasible else 0.0
        s["runtime_ms"] = round(s["runtime_ms"], 1)
    return out


@dataclass(frozen=True)
class BenchConfig:
    gen: GenConfig = field(default_factory=GenConfig)
    variants: tuple = ("rpc1", "rpcplus")
    algorithms: dict = field(default_factory=lambda: {"rpc1": ("exactnf2", "greedy"),
                                                      "rpcplus": ("simplegreedy", "ls2")})
    target: Target = Target()
    caps: GenCaps = GenCaps()
    setting: CostSetting = BASE
    intervals: Optional[tuple] = None
    workers: int = 1


def _bench_interval(args):
    bench, variant, i = args
    cfg = replace(bench.gen, variant=variant)
    inst = generate_instance(cfg, i)
    return run_batch(inst, variant, bench.algorithms[variant], bench.target, bench.caps,
                     seed=cfg.seed, setting=bench.setting)


def bench(config: BenchConfig, out_dir, timing: bool = False, progress=None) -> dict:
    """Full pipeline over all intervals; one CSV + JSON summary per variant.

    Interval pipelines are independent and seeded by ``(seed, interval)``;
    results are merged in interval order so the output does not depend on
    the worker count.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    intervals = config.intervals if config.intervals is not None else tuple(range(config.gen.num_intervals))
    summaries = {}
    for variant in config.variants:
        jobs = [(config, variant, i) for i in intervals]
        if config.workers > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_bench_interval, jobs))
        else:
            results = []
            for job in jobs:
                results.append(_bench_interval(job))
                if progress:
                    progress(variant, job[2], results[-1])
        reports = [r for batch in results for r in batch]
        summaries[variant] = emit_report(reports, out_dir / f"{variant}.csv", timing)
    return summaries
