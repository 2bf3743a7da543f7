"""Run the synthetic day for one or more cost settings and print a summary table.

    python3 scripts/run_bench.py --settings base,S3,S6 --out-dir runs/

Each setting gets its own subdirectory with ``rpc1.csv`` / ``rpcplus.csv``
and their JSON summaries.
"""
import argparse
import time
from dataclasses import replace
from pathlib import Path

from rideshare_rpc.harness import BenchConfig, Target, bench
from rideshare_rpc.instance import GenConfig
from rideshare_rpc.pricing import cost_setting


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--settings", default="base")
    p.add_argument("--target", default="c2")
    p.add_argument("--intervals", type=int, default=None, help="only the first N intervals")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="runs")
    args = p.parse_args()

    gen = GenConfig(seed=args.seed)
    intervals = None if args.intervals is None else tuple(range(args.intervals))
    base = BenchConfig(gen=gen, target=Target.parse(args.target), intervals=intervals, workers=args.workers)
    print(f"{'setting':8} {'variant':8} {'algorithm':13} {'served':>7} {'profit $':>11} "
          f"{'neg':>5} {'occ':>6} {'infeas':>6}")
    for name in args.settings.split(","):
        start = time.perf_counter()
        summary = bench(replace(base, setting=cost_setting(name)), Path(args.out_dir) / name.lower())
        for variant, algos in summary.items():
            for algo, s in algos.items():
                print(f"{name:8} {variant:8} {algo:13} {s['served']:7d} {s['profit_cents'] / 100:11.2f} "
                      f"{s['negative_matches']:5d} {s['occupancy_mean']:6.3f} {s['infeasible']:6d}")
        print(f"# {name}: {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
