"""Peer graph generation: regional random graphs and linear chains.

The regional generator gives every node a fixed number of outgoing peers
(default 8) subject to an incoming cap (default 117), assigns per-node
asymmetric bandwidth from a regional calibration table, and derives per-link
one-way propagation delay from the region pair. Graphs are regenerated with a
bumped sub-seed until connected, so a given seed always maps to the same
usable graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import yaml

OUTGOING_TARGET_DEFAULT = 8
INCOMING_CAP_DEFAULT = 117


def load_region_table(path: Optional[str] = None) -> dict:
    """Load the regional calibration table (bundled file by default)."""
    if path is None:
        ref = resources.files("blockrelay.data").joinpath("regions.yaml")
        text = ref.read_text(encoding="utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    table = yaml.safe_load(text)
    if "regions" not in table or "delay_ms" not in table:
        raise ValueError("region table needs 'regions' and 'delay_ms'")
    return table


@dataclass
class Topology:
    """Undirected peer graph with per-node rates and per-link delays."""

    node_count: int
    regions: list            # region name per node
    upload_bps: list         # bits/s per node
    download_bps: list       # bits/s per node
    neighbors: list          # adjacency: tuple of node ids per node
    delay: dict              # (min(u,v), max(u,v)) -> one-way delay seconds

    def link_delay(self, u: int, v: int) -> float:
        return self.delay[(u, v) if u < v else (v, u)]

    def edge_count(self) -> int:
        return len(self.delay)

    def is_connected(self) -> bool:
        return _connected(self.node_count, self.neighbors)


def _connected(n: int, neighbors: list) -> bool:
    if n == 0:
        return False
    seen = bytearray(n)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v in neighbors[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                stack.append(v)
    return count == n


def linear_topology(node_count: int, bandwidth_bps: float = 8e6,
                    delay_s: float = 0.0) -> Topology:
    """Chain of nodes 0-1-...-N-1 with uniform symmetric bandwidth."""
    if node_count < 2:
        raise ValueError("need at least 2 nodes")
    neighbors = []
    delay = {}
    for i in range(node_count):
        adj = []
        if i > 0:
            adj.append(i - 1)
        if i < node_count - 1:
            adj.append(i + 1)
            delay[(i, i + 1)] = delay_s
        neighbors.append(tuple(adj))
    return Topology(
        node_count=node_count,
        regions=["linear"] * node_count,
        upload_bps=[float(bandwidth_bps)] * node_count,
        download_bps=[float(bandwidth_bps)] * node_count,
        neighbors=neighbors,
        delay=delay,
    )


def generate_topology(node_count: int, seed: int,
                      outgoing: int = OUTGOING_TARGET_DEFAULT,
                      incoming_cap: int = INCOMING_CAP_DEFAULT,
                      region_table: Optional[dict] = None) -> Topology:
    """Regional random graph; deterministic in (node_count, seed)."""
    if node_count < 2:
        raise ValueError("need at least 2 nodes")
    if outgoing < 1 or outgoing >= node_count:
        raise ValueError("outgoing degree must be in [1, node_count)")
    if incoming_cap * node_count < outgoing * node_count:
        raise ValueError("incoming cap cannot absorb the outgoing demand")
    table = region_table if region_table is not None else load_region_table()

    for attempt in range(64):
        topo = _generate_once(node_count, seed, attempt, outgoing,
                              incoming_cap, table)
        if topo is not None and topo.is_connected():
            return topo
    raise RuntimeError("could not build a connected graph; constraints too tight")


def _generate_once(node_count, seed, attempt, outgoing, incoming_cap, table):
    # string seeds hash deterministically across processes; tuples do not
    rng = random.Random(f"{seed}|{attempt}|topology")
    names = list(table["regions"].keys())
    weights = [table["regions"][r]["weight"] for r in names]
    dl_ratio = float(table.get("download_ratio", 4.0))
    sigma = float(table.get("bandwidth_sigma", 0.0))
    jitter = float(table.get("delay_jitter", 0.0))

    regions = rng.choices(names, weights=weights, k=node_count)
    upload = []
    download = []
    for r in regions:
        mean = table["regions"][r]["upload_mbit"] * 1e6
        mult = rng.lognormvariate(-sigma * sigma / 2.0, sigma) if sigma > 0 else 1.0
        up = mean * mult
        upload.append(up)
        download.append(up * dl_ratio)

    incoming = [0] * node_count
    adj = [set() for _ in range(node_count)]
    order = list(range(node_count))
    rng.shuffle(order)
    for u in order:
        initiated = 0
        tries = 0
        while initiated < outgoing and tries < 40 * outgoing:
            tries += 1
            v = rng.randrange(node_count)
            if v == u or v in adj[u]:
                continue
            if incoming[v] >= incoming_cap:
                continue
            adj[u].add(v)
            adj[v].add(u)
            incoming[v] += 1
            initiated += 1
        if initiated < outgoing:
            return None

    neighbors = [tuple(sorted(a)) for a in adj]
    delay = {}
    dm = table["delay_ms"]
    for u in range(node_count):
        for v in neighbors[u]:
            if u < v:
                base = dm[regions[u]][regions[v]] / 1000.0
                mult = 1.0 + jitter * (2.0 * rng.random() - 1.0) if jitter > 0 else 1.0
                delay[(u, v)] = base * mult
    return Topology(
        node_count=node_count,
        regions=regions,
        upload_bps=upload,
        download_bps=download,
        neighbors=neighbors,
        delay=delay,
    )
