"""Passengers served by the most profitable assignment (RP) versus the
largest assignment meeting a profit target (RPC), on intervals small enough
for exact answers. An approximate run that misses the target counts as 0
served and is tallied under ``approx-infeas``.

    python3 scripts/rp_vs_rpc.py --setting S6 --factors 1.0,0.9,0.8,0.6
"""
import argparse
import math
from fractions import Fraction

from rideshare_rpc.flow import solve_rpc1_exact
from rideshare_rpc.greedy import greedy_rpc1, max_weight_matching
from rideshare_rpc.instance import GenConfig, generate_instance, generate_matches
from rideshare_rpc.ls2 import ls2
from rideshare_rpc.model import build_hypergraph
from rideshare_rpc.oracle import brute_rp, brute_rpcplus
from rideshare_rpc.pricing import cost_setting


def interval_graphs(variant, seed, passengers, intervals, setting):
    cfg = GenConfig(seed=seed, variant=variant, grid_size=10, spacing=600, regions_per_side=2,
                    num_intervals=intervals, peak_passengers=passengers,
                    offpeak_passengers=3 * passengers // 4)
    for i in range(intervals):
        inst = generate_instance(cfg, i)
        H = build_hypergraph(generate_matches(inst, seed=seed, setting=setting), inst.capacity)
        if H.edges:
            yield H, max(d.capacity for d in inst.drivers)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=11)
    p.add_argument("--setting", default="S6")
    p.add_argument("--intervals", type=int, default=24)
    p.add_argument("--rpc1-passengers", type=int, default=40)
    p.add_argument("--rpcplus-passengers", type=int, default=8)
    p.add_argument("--factors", default="1.0,0.9,0.8,0.6")
    args = p.parse_args()
    setting = cost_setting(args.setting)
    factors = [Fraction(f) for f in args.factors.split(",")]

    print(f"{'variant':8} {'c/w*':>5} {'RP':>6} {'exact':>6} {'approx':>6} {'more':>5} {'approx-infeas':>13}")
    for variant, n in (("rpc1", args.rpc1_passengers), ("rpcplus", args.rpcplus_passengers)):
        graphs = list(interval_graphs(variant, args.seed, n, args.intervals, setting))
        for f in factors:
            rp_total = exact_total = approx_total = more = missed = 0
            for H, lam in graphs:
                rp = max_weight_matching(H) if variant == "rpc1" else brute_rp(H)
                c = math.floor(f * rp.weight)
                if variant == "rpc1":
                    exact, approx = solve_rpc1_exact(H, c), greedy_rpc1(H, c)
                else:
                    exact, approx = brute_rpcplus(H, c), ls2(H, c, lam=lam)
                rp_total += rp.served
                exact_total += exact.served
                approx_total += approx.served if approx is not None else 0
                missed += approx is None
                more += exact.served > rp.served
            print(f"{variant:8} {float(f):5.2f} {rp_total:6d} {exact_total:6d} {approx_total:6d} {more:5d} {missed:13d}")


if __name__ == "__main__":
    main()
