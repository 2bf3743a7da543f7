import csv
import json
import random
from dataclasses import replace

import pytest

from rideshare_rpc.harness import (
    CSV_COLUMNS, BenchConfig, IntervalReport, Target, bench, emit_report, resolve_target, run_batch,
    seed_matching, solve,
)
from rideshare_rpc.instance import GenConfig, generate_instance
from rideshare_rpc.ls2 import profit_target_bound
from rideshare_rpc.model import FeasibleMatch, build_hypergraph
from rideshare_rpc.oracle import brute_rp

from .conftest import random_bipartite

TINY = GenConfig(seed=2, grid_size=8, spacing=600, regions_per_side=2, num_intervals=4,
                 peak_passengers=10, offpeak_passengers=8)


def test_target_parsing():
    assert Target.parse("c3") == Target("named", "c3")
    assert Target.parse("0.8") == Target("factor", 0.8)
    assert Target.parse("1234c") == Target("cents", 1234)
    assert Target.parse("0.8").label() == "0.8"
    with pytest.raises(ValueError):
        Target("named", "c4")


def test_factor_one_gives_mwm_weight():
    rng = random.Random(4)
    for _ in range(30):
        H = random_bipartite(rng)
        M = seed_matching(H, "rpc1")
        assert M.weight == brute_rp(H).weight
        assert resolve_target(Target("factor", 1.0), H, M, "rpc1", 1) == M.weight


def test_named_targets():
    H = build_hypergraph([(1, (1,), 100)])
    M = seed_matching(H, "rpc1")
    assert [resolve_target(Target.parse(t), H, M, "rpc1", 1) for t in ("c1", "c2", "c3")] == [100, 80, 60]
    M = seed_matching(H, "rpcplus")
    lb = min(profit_target_bound(H, M, 2), 60)
    got = [resolve_target(Target.parse(t), H, M, "rpcplus", 2) for t in ("c1", "c2", "c3")]
    assert got == [100, (100 - lb) // 2 + lb, lb]


def test_solve_rejects_unknown_algorithm():
    H = build_hypergraph([(1, (1,), 1)])
    with pytest.raises(ValueError):
        solve(H, "rpc1", "ls2", 0, 1)


def test_occupancy():
    r = IntervalReport(0, "x", 0, True, served=9, drivers=10)
    assert r.occupancy == pytest.approx(1.9)
    assert IntervalReport(0, "x", 0, True).occupancy == 0.0


def test_empty_report_is_header_only(tmp_path):
    summary = emit_report([], tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"
    assert summary == {}


def test_summary_totals_match_rows(tmp_path):
    reports = [IntervalReport(0, "a", 5, True, 3, 2, 7, 1, 1.5, 4),
               IntervalReport(1, "a", 9, True, 4, 3, 11, 0, 2.5, 5),
               IntervalReport(2, "a", 99, False, drivers=3)]
    summary = emit_report(reports, tmp_path / "r.csv", timing=True)
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert [r["runtime_ms"] for r in rows] == ["1.5", "2.5", "0.0"]
    assert rows[2]["served"] == "" and rows[2]["occupancy"] == ""
    s = summary["a"]
    assert (s["served"], s["matches"], s["profit_cents"], s["infeasible"]) == (7, 5, 18, 1)
    assert s["target_cents"] == 113
    assert json.loads((tmp_path / "r.json").read_text()) == summary


def test_runtime_blank_without_timing(tmp_path):
    emit_report([IntervalReport(0, "a", 5, True, 3, 2, 7, 1, 1.5, 4)], tmp_path / "r.csv")
    row = next(csv.DictReader(open(tmp_path / "r.csv")))
    assert row["runtime_ms"] == "" and row["occupancy"] == "1.750000"


def _hand_instance():
    inst = generate_instance(TINY, 0)
    # two drivers, two riders, one loss-making match
    inst.drivers = inst.drivers[:2]
    inst.passengers = inst.passengers[:2]
    inst.matches = [FeasibleMatch(d.id, (p.id,), revenue=w, profit=w) for (d, p), w in zip(
        [(inst.drivers[0], inst.passengers[0]), (inst.drivers[0], inst.passengers[1]),
         (inst.drivers[1], inst.passengers[0])], (50, 30, -10))]
    return inst


def test_run_batch_rpc1_against_oracle():
    inst = _hand_instance()
    for t in ("c1", "c2", "c3"):
        reps = run_batch(inst, "rpc1", ("exactnf2", "greedy", "oracle"), Target.parse(t))
        exact, greedy, oracle = reps
        assert (exact.served, exact.profit_cents) == (oracle.served, oracle.profit_cents)
        assert all(r.profit_cents >= r.target_cents for r in reps if r.feasible)
    exact, greedy = run_batch(inst, "rpc1", ("exactnf2", "greedy"), Target("cents", 20))
    assert (exact.served, exact.negative_matches, exact.profit_cents) == (2, 1, 20)
    assert greedy.served == 1  # the seed keeps (d0, p0), which blocks the loss-making edge
    exact, = run_batch(inst, "rpc1", ("exactnf2",), Target("cents", 21))
    assert (exact.served, exact.profit_cents) == (1, 50)
    infeasible, = run_batch(inst, "rpc1", ("exactnf2",), Target("cents", 51))
    assert not infeasible.feasible


def test_bench_generates_and_meets_targets(tmp_path):
    cfg = BenchConfig(gen=TINY, intervals=(0, 1))
    summary = bench(cfg, tmp_path)
    assert set(summary) == {"rpc1", "rpcplus"}
    for variant in ("rpc1", "rpcplus"):
        rows = list(csv.DictReader(open(tmp_path / f"{variant}.csv")))
        assert len(rows) == 4
        for r in rows:
            if r["served"]:
                assert int(r["profit_cents"]) >= int(r["target_cents"])
    first = (tmp_path / "rpc1.csv").read_bytes()
    bench(replace(cfg, variants=("rpc1",)), tmp_path / "again")
    assert (tmp_path / "again" / "rpc1.csv").read_bytes() == first
