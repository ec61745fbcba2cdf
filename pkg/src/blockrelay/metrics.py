"""Metric extraction and CSV emission for simulation runs.

One run yields per-block coverage times (time until a fraction of nodes holds
the block) and run-level aggregates: L = median time to 90% coverage, the
divergence ratio delta = L / T_B, the stale rate, and byte counters. Reports
serialize to a two-file CSV contract, blocks.csv and summary.csv, with
versioned headers; repeated runs of the same matrix produce byte-identical
files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .coding import gf256
from .netsim import Simulation, RunResult, build_topology
from .netsim.scenario import Scenario

BLOCKS_SCHEMA = "blocks/1"
SUMMARY_SCHEMA = "summary/1"

BLOCKS_COLUMNS = ("run_id", "block_id", "height", "miner", "mine_time_s",
                  "t50_s", "t90_s", "t100_s", "stale")
SUMMARY_COLUMNS = ("run_id", "protocol", "block_mb", "k", "M", "nodes",
                   "seed", "L50_s", "L90_s", "delta", "stale_rate",
                   "bytes_total", "bytes_wasted")

JOBS_ENV = "BLOCKRELAY_JOBS"


class MatrixError(RuntimeError):
    """A matrix cell failed; the message names the cell."""


def run_id_for(sc: Scenario) -> str:
    mb = sc.block_size_bytes / 1e6
    return (f"{sc.protocol}_{mb:g}mb_k{sc.chunks_k}_m{sc.m}"
            f"_n{sc.node_count}_s{sc.seed}")


def mean_reception_latency(result: RunResult) -> float:
    """Mean seconds from mining to reception, all nodes, non-excluded blocks.

    This is the fork-window statistic: a competing block is only mined by a
    node that has not received the current one yet, and the next miner is a
    uniform draw over nodes, so the expected vulnerable window per block is
    the mean reception delay (the miner's own zero counts as no window).
    """
    lats = [result.reception_latency(b) for b in sorted(result.descriptors)
            if b not in result.excluded]
    if not lats:
        return float("nan")
    return float(np.nanmean(np.concatenate(lats)))


def coverage_latency(result: RunResult, block_id: int, fraction: float) -> float:
    """Seconds from mining until `fraction` of nodes hold the block; nan if never."""
    if not (0.0 < fraction <= 1.0):
        raise ValueError("coverage fraction must be in (0, 1]")
    rec = np.sort(result.reception[block_id])   # nan sorts last
    idx = math.ceil(fraction * len(rec)) - 1
    t = rec[idx]
    if np.isnan(t):
        return float("nan")
    return float(t - result.descriptors[block_id].mine_time)


@dataclass
class MetricsReport:
    """Aggregated view of one run, ready for CSV emission."""

    run_id: str
    result: RunResult

    @property
    def scenario(self) -> Scenario:
        return self.result.scenario

    def block_ids(self) -> List[int]:
        return sorted(self.result.descriptors)

    def coverage_latencies(self, fraction: float) -> Dict[int, float]:
        return {b: coverage_latency(self.result, b, fraction)
                for b in self.block_ids()}

    def extract_latency(self, fraction: float = 0.9):
        """(median over covered blocks, count of blocks never covered)."""
        vals = np.array(list(self.coverage_latencies(fraction).values()))
        covered = vals[~np.isnan(vals)]
        missed = int(np.isnan(vals).sum())
        med = float(np.median(covered)) if covered.size else float("nan")
        return med, missed

    @property
    def latency(self) -> float:
        return self.extract_latency(0.9)[0]

    @property
    def delta(self) -> float:
        return self.latency / self.scenario.t_b

    @property
    def stale_rate(self) -> float:
        n_stale = len(self.result.stale)
        n_canon = len(self.result.canonical)
        total = n_stale + n_canon
        return n_stale / total if total else 0.0

    def empirical_vs_model(self):
        """(measured stale rate, fork probability the latency model predicts)."""
        return self.stale_rate, 1.0 - math.exp(-self.delta)

    # ----- CSV rows -----

    def block_rows(self) -> List[dict]:
        res = self.result
        rows = []
        for b in self.block_ids():
            d = res.descriptors[b]
            rows.append({
                "run_id": self.run_id,
                "block_id": b,
                "height": d.height,
                "miner": d.miner,
                "mine_time_s": _sec(d.mine_time),
                "t50_s": _sec(coverage_latency(res, b, 0.5)),
                "t90_s": _sec(coverage_latency(res, b, 0.9)),
                "t100_s": _sec(coverage_latency(res, b, 1.0)),
                "stale": 1 if b in res.stale else 0,
            })
        return rows

    def summary_row(self) -> dict:
        sc = self.scenario
        l50, _ = self.extract_latency(0.5)
        l90, _ = self.extract_latency(0.9)
        return {
            "run_id": self.run_id,
            "protocol": sc.protocol,
            "block_mb": f"{sc.block_size_bytes / 1e6:g}",
            "k": sc.chunks_k,
            "M": sc.m,
            "nodes": sc.node_count,
            "seed": sc.seed,
            "L50_s": _sec(l50),
            "L90_s": _sec(l90),
            "delta": f"{l90 / sc.t_b:.9g}",
            "stale_rate": f"{self.stale_rate:.9g}",
            "bytes_total": f"{self.result.bytes_wire:.0f}",
            "bytes_wasted": f"{self.result.bytes_wasted:.0f}",
        }


def _sec(x: float) -> str:
    return "nan" if (x != x) else f"{x:.9f}"


def _run_cell(args):
    sc_dict, trace = args
    sc = Scenario.from_dict(sc_dict)
    sim = Simulation(sc, trace=trace)
    result = sim.run()
    return result, sim.trace_lines


def run_matrix(scenarios: Sequence[Scenario], out_dir: Optional[str] = None,
               trace: bool = False, jobs: Optional[int] = None,
               ) -> List[MetricsReport]:
    """Run every cell, in order; optionally write the CSV bundle to out_dir.

    Cells are independent; with jobs > 1 (or BLOCKRELAY_JOBS set) they run in
    a process pool, but reports and files always come out in config order.
    """
    ids = [run_id_for(sc) for sc in scenarios]
    if len(set(ids)) != len(ids):
        raise MatrixError("duplicate cell run_ids; differentiate seeds or params")

    if jobs is None:
        jobs = int(os.environ.get(JOBS_ENV, "1") or "1")
    payload = [(sc.to_dict(), trace) for sc in scenarios]

    outcomes = []
    if jobs > 1 and len(scenarios) > 1:
        import multiprocessing as mp
        with mp.Pool(processes=jobs) as pool:
            it = pool.imap(_run_cell, payload)
            for rid in ids:
                try:
                    outcomes.append(it.next())
                except Exception as exc:
                    raise MatrixError(f"cell {rid} failed: {exc}") from exc
    else:
        for rid, item in zip(ids, payload):
            try:
                outcomes.append(_run_cell(item))
            except Exception as exc:
                raise MatrixError(f"cell {rid} failed: {exc}") from exc

    reports = [MetricsReport(run_id=rid, result=res)
               for rid, (res, _tr) in zip(ids, outcomes)]
    if out_dir is not None:
        write_report_bundle(reports, out_dir)
        if trace:
            for rid, (_res, lines) in zip(ids, outcomes):
                path = os.path.join(out_dir, f"{rid}.trace")
                with open(path, "w") as fh:
                    fh.write("\n".join(lines or []) + "\n")
    return reports


def write_csv(path: str, schema: str, columns: Sequence[str],
              rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {schema}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in columns) + "\n")


def write_report_bundle(reports: Sequence[MetricsReport], out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    block_rows = [row for rep in reports for row in rep.block_rows()]
    write_csv(os.path.join(out_dir, "blocks.csv"),
              BLOCKS_SCHEMA, BLOCKS_COLUMNS, block_rows)
    write_csv(os.path.join(out_dir, "summary.csv"),
              SUMMARY_SCHEMA, SUMMARY_COLUMNS,
              [rep.summary_row() for rep in reports])
    meta = {
        "version": __version__,
        "kernel_backend": gf256.BACKEND,
        "cells": [
            {
                "run_id": rep.run_id,
                "seed": rep.scenario.seed,
                "config_digest": rep.scenario.config_digest(),
            }
            for rep in reports
        ],
    }
    with open(os.path.join(out_dir, "run_meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv(path: str):
    """Read one contract CSV; returns (schema, list of row dicts)."""
    with open(path, "r") as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema: "):
            raise ValueError(f"{path}: missing schema header line")
        schema = first[len("# schema: "):]
        columns = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append(dict(zip(columns, line.split(","))))
    return schema, rows
