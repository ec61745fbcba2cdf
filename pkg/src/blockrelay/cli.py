"""Command-line front end: simulate, calc, sweep, bench.

simulate runs one or more scenario cells from a YAML config and writes the
CSV bundle; calc evaluates a closed-form quantity from --params key=value
pairs; sweep tabulates a formula over a parameter range as CSV on stdout;
bench times the compiled coding kernels against the pure-Python fallback.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

import yaml

from . import analytic, metrics
from .netsim.scenario import Scenario

_PARAM_FIELDS = {f.name for f in dataclasses.fields(analytic.AnalyticParams)}

# formulas that need the full parameter record
_PARAM_FORMULAS = {
    "tps": analytic.tps,
    "latency_sr": analytic.latency_sr,
    "latency_cbr": analytic.latency_cbr,
    "latency_ct": analytic.latency_ct,
    "gain_ct": analytic.gain_ct,
    "latency_sr_closed": analytic.latency_sr_closed,
    "latency_cbr_closed": analytic.latency_cbr_closed,
    "latency_ct_closed": analytic.latency_ct_closed,
    "gain_ct_closed": analytic.gain_ct_closed,
    "gain_ct_fragmented_closed": analytic.gain_ct_fragmented_closed,
}

# formulas of (latency, block interval) only
_RATE_FORMULAS = {
    "fork_probability": analytic.fork_probability,
    "divergence": analytic.divergence,
}

FORMULAS = sorted(_PARAM_FORMULAS) + sorted(_RATE_FORMULAS) + ["optimal_k"]


def _parse_params(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise SystemExit(f"bad --params entry {pair!r}; expected key=value")
        key, val = pair.split("=", 1)
        key = key.lower()
        out[key] = val
    return out


def _analytic_params(raw: dict) -> analytic.AnalyticParams:
    kw = {}
    for key, val in raw.items():
        if key in ("l", "latency"):
            continue
        if key not in _PARAM_FIELDS:
            raise SystemExit(f"unknown parameter {key!r}; "
                             f"known: {sorted(_PARAM_FIELDS)}")
        kw[key] = int(float(val)) if key in ("n", "k") else float(val)
    return analytic.AnalyticParams(**kw)


def cmd_calc(args) -> int:
    raw = _parse_params(args.params)
    name = args.formula
    if name in _RATE_FORMULAS:
        if "l" not in raw and "latency" not in raw:
            raise SystemExit(f"{name} needs l=<seconds> in --params")
        lat = float(raw.get("l", raw.get("latency")))
        t_b = float(raw.get("t_b", 600.0))
        print(f"{_RATE_FORMULAS[name](lat, t_b):.9g}")
        return 0
    p = _analytic_params(raw)
    if name == "optimal_k":
        res = analytic.optimal_k(p)
        for key, val in dataclasses.asdict(res).items():
            print(f"{key} = {val}")
        return 0
    if name not in _PARAM_FORMULAS:
        raise SystemExit(f"unknown formula {name!r}; known: {FORMULAS}")
    print(f"{_PARAM_FORMULAS[name](p):.9g}")
    return 0


def cmd_sweep(args) -> int:
    raw = _parse_params(args.params)
    name = args.formula
    try:
        parts = [float(x) for x in args.range.split(":")]
        start, stop, step = parts
    except ValueError:
        raise SystemExit("--range must be start:stop:step")
    if step <= 0:
        raise SystemExit("--range step must be positive")

    over = args.over.lower()
    out = args.out and open(args.out, "w") or sys.stdout
    print(f"# schema: sweep/1", file=out)
    print(f"{over},{name}", file=out)
    x = start
    while x <= stop + 1e-12:
        point = dict(raw)
        point[over] = repr(x)
        if name in _RATE_FORMULAS:
            lat = float(point.get("l", point.get("latency", "nan")))
            t_b = float(point.get("t_b", 600.0))
            val = _RATE_FORMULAS[name](lat, t_b)
        else:
            p = _analytic_params(point)
            if name not in _PARAM_FORMULAS:
                raise SystemExit(f"unknown formula {name!r}; known: {FORMULAS}")
            val = _PARAM_FORMULAS[name](p)
        print(f"{x:.9g},{val:.9g}", file=out)
        x += step
    if out is not sys.stdout:
        out.close()
    return 0


def load_cells(config_path: str):
    with open(config_path, "r") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise SystemExit("config must be a mapping")
    if "cells" in doc:
        defaults = doc.get("defaults", {}) or {}
        cells = doc["cells"] or []
        return [Scenario.from_dict({**defaults, **cell}) for cell in cells]
    return [Scenario.from_dict(doc)]


def cmd_simulate(args) -> int:
    cells = load_cells(args.config)
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
        cells = [sc.replace(seed=s) for sc in cells for s in seeds]
    reports = metrics.run_matrix(cells, out_dir=args.out, trace=args.trace)
    for rep in reports:
        row = rep.summary_row()
        print(f"{row['run_id']}: L90={row['L90_s']}s delta={row['delta']} "
              f"stale_rate={row['stale_rate']}")
    return 0


def cmd_bench(args) -> int:
    import numpy as np
    from .coding import gf256
    from .coding import _gf256py as pure_kern

    pure_kern.init_tables(gf256.MUL, gf256.INV)
    rng = np.random.default_rng(7)
    m = args.m
    payload = args.payload
    rows = rng.integers(0, 256, size=(m, m), dtype=np.uint8)
    pays = rng.integers(0, 256, size=(m, payload), dtype=np.uint8)

    def run(kern, label):
        t0 = time.perf_counter()
        reps = 0
        while time.perf_counter() - t0 < args.seconds:
            rmat = np.zeros((m, m), dtype=np.uint8)
            pmat = np.zeros((m, payload), dtype=np.uint8)
            occ = np.zeros(m, dtype=np.uint8)
            for i in range(m):
                kern.decoder_add(rmat, pmat, occ,
                                 rows[i].copy(), pays[i].copy())
            reps += 1
        dt = time.perf_counter() - t0
        rate = reps * m / dt
        print(f"{label:10s} {rate:12.0f} chunk adds/s "
              f"({reps} decodes of rank {m}, payload {payload} B)")
        return rate

    compiled = None
    if gf256.BACKEND == "compiled":
        compiled = run(gf256.kernels, "compiled")
    pure = run(pure_kern, "pure")
    if compiled:
        print(f"speedup    {compiled / pure:12.1f}x")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="blockrelay",
        description="block relay simulator and closed-form model toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    ap_sim = sub.add_parser("simulate", help="run scenario cells from a config")
    ap_sim.add_argument("--config", required=True)
    ap_sim.add_argument("--out", default=None,
                        help="directory for blocks.csv / summary.csv / run_meta.json")
    ap_sim.add_argument("--seeds", default=None,
                        help="comma-separated seed overrides, e.g. 1,2,3")
    ap_sim.add_argument("--trace", action="store_true",
                        help="write one message-level trace file per cell")
    ap_sim.set_defaults(func=cmd_simulate)

    ap_calc = sub.add_parser("calc", help="evaluate one closed-form quantity")
    ap_calc.add_argument("formula", choices=FORMULAS)
    ap_calc.add_argument("--params", nargs="*", default=[],
                         metavar="key=value")
    ap_calc.set_defaults(func=cmd_calc)

    ap_sweep = sub.add_parser("sweep", help="tabulate a formula over a range")
    ap_sweep.add_argument("--formula", required=True)
    ap_sweep.add_argument("--over", required=True,
                          help="parameter to vary, e.g. k or s_block")
    ap_sweep.add_argument("--range", required=True, metavar="START:STOP:STEP")
    ap_sweep.add_argument("--params", nargs="*", default=[],
                          metavar="key=value")
    ap_sweep.add_argument("--out", default=None)
    ap_sweep.set_defaults(func=cmd_sweep)

    ap_bench = sub.add_parser("bench", help="time coding kernels, both backends")
    ap_bench.add_argument("--m", type=int, default=64)
    ap_bench.add_argument("--payload", type=int, default=4096)
    ap_bench.add_argument("--seconds", type=float, default=1.0)
    ap_bench.set_defaults(func=cmd_bench)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
