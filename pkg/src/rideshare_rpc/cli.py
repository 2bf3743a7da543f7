"""Command line entry point: ``python3 -m rideshare_rpc <command> ...``.

Every option can also come from an environment variable named ``RPC_``
plus the option name in upper case with dashes as underscores (for example
``RPC_COST_SETTING=S3``). Precedence: command line, environment, the JSON
file given by ``--config``, built-in default.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .harness import ALGORITHMS, BenchConfig, Target, bench, resolve_target, run_batch, seed_matching, solve
from .instance import GenConfig, Instance, generate_instance, generate_matches, match_to_json
from .matchgen import GenCaps
from .model import build_hypergraph, validate_matching
from .pricing import COST_SETTINGS, cost_setting

ENV_PREFIX = "RPC_"

# built-in defaults; argparse defaults stay None so the sources can be layered
DEFAULTS = {
    "seed": 0,
    "variant": "rpc1",
    "interval": 0,
    "cost_setting": "base",
    "target": "c2",
    "workers": 1,
    "variants": "rpc1,rpcplus",
}

INT_OPTS = {"seed", "interval", "workers", "target_cents", "passengers", "grid_size"}
FLOAT_OPTS = {"tau", "target_factor"}


class Options:
    """Layered lookup over parsed args, environment and config file."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = {}
        if getattr(args, "config", None):
            self.file = json.loads(Path(args.config).read_text())

    def get(self, name, default=None):
        val = getattr(self.args, name, None)
        if val is not None and val is not False:
            return val
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            if name in INT_OPTS:
                return int(env)
            if name in FLOAT_OPTS:
                return float(env)
            if isinstance(val, bool) or val is False:
                return env.lower() in ("1", "true", "yes")
            return env
        if name in self.file:
            return self.file[name]
        return DEFAULTS.get(name, default)

    def gen_config(self, variant=None) -> GenConfig:
        obj = dict(self.file.get("gen", {}))
        cfg = GenConfig.from_json(obj) if obj else GenConfig()
        over = {"seed": self.get("seed")}
        if variant is not None:
            over["variant"] = variant
        if self.get("passengers") is not None:
            n = self.get("passengers")
            over["peak_passengers"] = n
            over["offpeak_passengers"] = n
        if self.get("grid_size") is not None:
            over["grid_size"] = self.get("grid_size")
        return replace(cfg, **over)

    def caps(self) -> GenCaps:
        obj = dict(self.file.get("caps", {}))
        if self.get("tau") is not None:
            obj["tau"] = self.get("tau")
        return GenCaps(**obj)

    def target(self) -> Target:
        cents = self.get("target_cents")
        factor = self.get("target_factor")
        if cents is not None and factor is not None:
            raise ValueError("give --target-factor or --target-cents, not both")
        if cents is not None:
            return Target("cents", int(cents))
        if factor is not None:
            return Target("factor", float(factor))
        return Target.parse(self.get("target"))


def _common(p, config=True):
    if config:
        p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)


def _instance_source(p):
    p.add_argument("--instance", help="instance JSON (from `generate` or `matches`)")
    p.add_argument("--interval", type=int, help="interval to generate when no --instance is given")
    p.add_argument("--passengers", type=int, help="passengers per interval for generated instances")
    p.add_argument("--grid-size", type=int)


def _pricing(p):
    p.add_argument("--cost-setting", choices=sorted(COST_SETTINGS, key=str.lower))
    p.add_argument("--tau", type=float, help="straight-line screen factor")


def _target(p):
    p.add_argument("--target", help="c1, c2 or c3 (variant-specific definitions)")
    p.add_argument("--target-factor", type=float, help="target = factor * w(seed matching)")
    p.add_argument("--target-cents", type=int, help="absolute target in cents")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rideshare_rpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write one synthetic interval as instance JSON")
    _common(p)
    p.add_argument("--variant", choices=["rpc1", "rpcplus"])
    p.add_argument("--interval", type=int)
    p.add_argument("--passengers", type=int)
    p.add_argument("--grid-size", type=int)
    p.add_argument("--out", help="output path (stdout if omitted)")

    p = sub.add_parser("matches", help="enumerate and price feasible matches of an instance")
    _common(p)
    p.add_argument("--instance", required=True)
    _pricing(p)
    p.add_argument("--out", help="output path (stdout if omitted)")

    p = sub.add_parser("solve", help="solve one interval")
    _common(p)
    _instance_source(p)
    p.add_argument("--variant", choices=["rpc1", "rpcplus", "rp"])
    p.add_argument("--algo", choices=sorted({a for v in ALGORITHMS.values() for a in v}))
    _target(p)
    _pricing(p)
    p.add_argument("--aggressive", action="store_true", help="LS2: also accept 3-passenger swaps when lambda = 2")
    p.add_argument("--out", help="write the solution JSON here")

    p = sub.add_parser("bench", help="full pipeline over all intervals")
    _common(p)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--variants", help="comma separated, e.g. rpc1,rpcplus")
    p.add_argument("--intervals", help="e.g. 0-11 or 4,5,6 (default: all)")
    p.add_argument("--passengers", type=int)
    p.add_argument("--grid-size", type=int)
    _target(p)
    _pricing(p)
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="fill runtime_ms in the CSV (breaks byte equality)")

    p = sub.add_parser("oracle", help="brute force a small instance and compare with the fast solvers")
    _common(p)
    _instance_source(p)
    p.add_argument("--variant", choices=["rpc1", "rpcplus", "rp"])
    _target(p)
    _pricing(p)
    return parser


def _parse_intervals(text, n):
    if text is None:
        return None
    out = []
    for part in str(text).split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    bad = [i for i in out if not 0 <= i < n]
    if bad:
        raise SystemExit(f"intervals out of range: {bad}")
    return tuple(out)


def _emit(obj, out):
    text = json.dumps(obj, separators=(",", ":")) if not isinstance(obj, str) else obj
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text + "\n")


def _load_instance(opts: Options, variant: str) -> Instance:
    path = opts.get("instance")
    if path:
        return Instance.load(path)
    gen_variant = "rpcplus" if variant == "rpcplus" else "rpc1"
    return generate_instance(opts.gen_config(gen_variant), opts.get("interval"))


def _priced(opts: Options, inst: Instance) -> Instance:
    if inst.matches is None:
        inst.matches = generate_matches(inst, opts.caps(), opts.get("seed"),
                                        setting=cost_setting(opts.get("cost_setting")))
    return inst


def cmd_generate(opts: Options):
    cfg = opts.gen_config(opts.get("variant"))
    _emit(generate_instance(cfg, opts.get("interval")).dumps(), opts.get("out"))


def cmd_matches(opts: Options):
    inst = Instance.load(opts.get("instance"))
    inst.matches = None
    _emit(_priced(opts, inst).dumps(), opts.get("out"))


def cmd_solve(opts: Options):
    variant = opts.get("variant")
    algo = opts.get("algo") or ALGORITHMS[variant][0]
    inst = _priced(opts, _load_instance(opts, variant))
    rep, = run_batch(inst, variant, [algo], opts.target(), opts.caps(), opts.get("seed"),
                     setting=cost_setting(opts.get("cost_setting")), aggressive=opts.get("aggressive"))
    out = {
        "interval": rep.interval, "variant": variant, "algorithm": algo, "feasible": rep.feasible,
        "target_cents": rep.target_cents, "served": rep.served, "matches": rep.matches,
        "profit_cents": rep.profit_cents, "negative_matches": rep.negative_matches,
        "runtime_ms": round(rep.runtime_ms, 1), "occupancy": round(rep.occupancy, 6),
    }
    print(json.dumps(out, indent=2))
    if opts.get("out"):
        H = build_hypergraph(inst.matches, inst.capacity)
        lam = max((d.capacity for d in inst.drivers), default=1)
        M = solve(H, variant, algo, rep.target_cents, lam, aggressive=opts.get("aggressive"))
        chosen = [] if M is None else [match_to_json(inst.matches[i]) for i in sorted(M.edges)]
        Path(opts.get("out")).write_text(json.dumps({**out, "assignment": chosen}, indent=2))


def cmd_bench(opts: Options):
    gen = opts.gen_config()
    variants = tuple(v.strip() for v in str(opts.get("variants")).split(",") if v.strip())
    for v in variants:
        if v not in ("rpc1", "rpcplus"):
            raise SystemExit(f"bench variants are rpc1 and rpcplus, got {v!r}")
    algos = {"rpc1": ("exactnf2", "greedy"), "rpcplus": ("simplegreedy", "ls2")}
    algos.update({k: tuple(v) for k, v in opts.file.get("algorithms", {}).items()})
    cfg = BenchConfig(gen=gen, variants=variants, algorithms=algos, target=opts.target(), caps=opts.caps(),
                      setting=cost_setting(opts.get("cost_setting")),
                      intervals=_parse_intervals(opts.get("intervals"), gen.num_intervals),
                      workers=opts.get("workers"))
    out_dir = opts.get("out_dir") or "bench_out"
    start = time.perf_counter()

    def progress(variant, i, reports):
        cells = " ".join(f"{r.algorithm}={r.served if r.feasible else 'infeasible'}" for r in reports)
        print(f"[{time.perf_counter() - start:7.1f}s] {variant} interval {i:2d}: {cells}", file=sys.stderr)

    summary = bench(cfg, out_dir, timing=opts.get("timing"), progress=progress)
    print(json.dumps({"out_dir": str(out_dir), "elapsed_s": round(time.perf_counter() - start, 1),
                      "summary": summary}, indent=2))


def cmd_oracle(opts: Options):
    from .oracle import brute_rp, brute_rpc1, brute_rpcplus

    variant = opts.get("variant")
    inst = _priced(opts, _load_instance(opts, variant))
    H = build_hypergraph(inst.matches, inst.capacity)
    lam = max((d.capacity for d in inst.drivers), default=1)
    M0 = seed_matching(H, variant)
    c = resolve_target(opts.target(), H, M0, variant, lam)
    fast = {a: solve(H, variant, a, c, lam, seed=M0 if a != "exactnf2" else None)
            for a in ALGORITHMS[variant] if a != "oracle"}
    if variant == "rp" and not H.is_bipartite():
        fast.pop("exactnf2", None)
    brute = {"rpc1": lambda: brute_rpc1(H, c), "rpcplus": lambda: brute_rpcplus(H, c),
             "rp": lambda: brute_rp(H)}[variant]()

    def describe(M):
        if M is None:
            return {"feasible": False}
        return {"feasible": True, "served": M.served, "weight": M.weight, "edges": sorted(M.edges),
                "valid": validate_matching(H, M).ok}

    print(json.dumps({"edges": len(H.edges), "target_cents": c, "oracle": describe(brute),
                      **{a: describe(M) for a, M in fast.items()}}, indent=2))


COMMANDS = {"generate": cmd_generate, "matches": cmd_matches, "solve": cmd_solve,
            "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = Options(args)
    try:
        COMMANDS[args.command](opts)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
