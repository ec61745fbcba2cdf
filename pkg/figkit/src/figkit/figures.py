"""The four result figures, rendered deterministically from contract CSVs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .contract import ContractError, read_blocks, read_summary

KINDS = ("median_vs_size", "cdf", "stale_vs_delta", "delta_vs_size")

# fixed salt keeps matplotlib's generated SVG ids stable across runs
matplotlib.rcParams["svg.hashsalt"] = "figkit"


def model_stale_rate(delta: float) -> float:
    """Expected stale fraction for a given propagation divergence."""
    if delta < 0:
        raise ValueError("divergence must be >= 0")
    return 1.0 - math.exp(-delta)


@dataclass
class FigureSpec:
    kind: str
    summary_path: str
    blocks_path: str
    out_path: str


@dataclass
class RenderedFigure:
    path: str
    series: List[str] = field(default_factory=list)


def _series_groups(rows) -> List[Tuple[str, List[dict]]]:
    """Group summary rows by (protocol, k); label k only when it varies."""
    ks_per_proto: Dict[str, set] = {}
    for row in rows:
        ks_per_proto.setdefault(row["protocol"], set()).add(row["k"])
    groups: Dict[Tuple[str, str], List[dict]] = {}
    for row in rows:
        groups.setdefault((row["protocol"], row["k"]), []).append(row)
    out = []
    for proto, k in sorted(groups, key=lambda g: (g[0], int(g[1]))):
        label = proto if len(ks_per_proto[proto]) == 1 else f"{proto} k={k}"
        out.append((label, groups[(proto, k)]))
    return out


def _require_rows(rows, path):
    if not rows:
        raise ContractError(f"{path}: no data rows to plot")
    return rows


def _line_by_size(spec: FigureSpec, value_col: str, y_label: str,
                  title: str) -> RenderedFigure:
    rows = _require_rows(read_summary(spec.summary_path), spec.summary_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    labels = []
    for label, group in _series_groups(rows):
        pts = sorted((float(r["block_mb"]), float(r[value_col]))
                     for r in group)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, marker="o", label=label)
        labels.append(label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("block size (MB)")
    ax.set_ylabel(y_label)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return _save(fig, spec.out_path, labels)


def _fig_median_vs_size(spec: FigureSpec) -> RenderedFigure:
    return _line_by_size(spec, "L90_s", "median time to 90% coverage (s)",
                         "Propagation latency vs block size")


def _fig_delta_vs_size(spec: FigureSpec) -> RenderedFigure:
    return _line_by_size(spec, "delta", "divergence (latency / interval)",
                         "Propagation divergence vs block size")


def _fig_cdf(spec: FigureSpec) -> RenderedFigure:
    rows = _require_rows(read_blocks(spec.blocks_path), spec.blocks_path)
    by_run: Dict[str, List[float]] = {}
    for row in rows:
        t = float(row["t90_s"])
        if math.isfinite(t):
            by_run.setdefault(row["run_id"], []).append(t)
    if not by_run:
        raise ContractError(f"{spec.blocks_path}: no finite latencies")

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    labels = []
    for run_id in sorted(by_run):
        xs = np.sort(np.array(by_run[run_id]))
        ys = np.arange(1, len(xs) + 1) / len(xs)
        # a CDF must be non-decreasing in both coordinates
        assert np.all(np.diff(xs) >= 0) and np.all(np.diff(ys) > 0)
        ax.step(xs, ys, where="post", label=run_id)
        labels.append(run_id)
    ax.set_xlabel("time to 90% coverage (s)")
    ax.set_ylabel("fraction of blocks")
    ax.set_ylim(0.0, 1.02)
    ax.set_title("Per-block latency distribution")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _save(fig, spec.out_path, labels)


def _fig_stale_vs_delta(spec: FigureSpec) -> RenderedFigure:
    rows = _require_rows(read_summary(spec.summary_path), spec.summary_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    labels = []
    by_proto: Dict[str, List[Tuple[float, float]]] = {}
    for row in rows:
        by_proto.setdefault(row["protocol"], []).append(
            (float(row["delta"]), float(row["stale_rate"])))
    for proto in sorted(by_proto):
        pts = sorted(by_proto[proto])
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                linestyle="none", marker="o", label=proto)
        labels.append(proto)

    top = max(d for pts in by_proto.values() for d, _ in pts)
    grid = np.linspace(0.0, max(top, 1e-6) * 1.1, 256)
    ax.plot(grid, [model_stale_rate(d) for d in grid],
            linestyle="--", color="black", label="model: 1 - exp(-delta)")
    labels.append("model: 1 - exp(-delta)")
    ax.set_xlabel("divergence (latency / interval)")
    ax.set_ylabel("stale rate")
    ax.set_title("Stale rate vs propagation divergence")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _save(fig, spec.out_path, labels)


def _save(fig, out_path: str, labels: List[str]) -> RenderedFigure:
    fig.tight_layout()
    # suppressing the date stamp keeps output byte-identical per input
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return RenderedFigure(path=out_path, series=labels)


_RENDERERS = {
    "median_vs_size": _fig_median_vs_size,
    "cdf": _fig_cdf,
    "stale_vs_delta": _fig_stale_vs_delta,
    "delta_vs_size": _fig_delta_vs_size,
}


def render(spec: FigureSpec) -> RenderedFigure:
    if spec.kind not in _RENDERERS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; know {KINDS}")
    return _RENDERERS[spec.kind](spec)
