"""Deterministic discrete-event simulation core.

Three event kinds drive a run: block arrivals from the pre-drawn mining
schedule, message deliveries, and CPU completions. Each node's upload is an
exclusive FIFO (one message serializing at a time, rate capped by the
receiver's download), realized arithmetically through a per-node
upload-free-at clock rather than queue objects. Validation shares a per-node
CPU FIFO the same way. Ties in time break on a monotone sequence number, so
identical (scenario, seed) pairs replay identical event orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappush, heappop, heapify
from typing import Dict, List, Optional

import numpy as np

from .blocks import BlockDescriptor, make_descriptor
from .chainview import ChainView, classify_stale
from .mining import mining_schedule
from .scenario import Scenario
from .topology import Topology, generate_topology, linear_topology, load_region_table

EV_MINE = 0
EV_DELIVER = 1
EV_CPU = 2

# message kinds
K_INV = 1
K_GETDATA = 2
K_FULL = 3
K_GETCMPCT = 4
K_CMPCT = 5
K_GETTXN = 6
K_TXN = 7
K_HDR = 8
K_QUERY = 9
K_CHUNK = 10
K_CODED = 11
K_ACK = 12
K_ABORT = 13

KIND_NAMES = {
    K_INV: "inv",
    K_GETDATA: "getdata",
    K_FULL: "fullblock",
    K_GETCMPCT: "getcmpct",
    K_CMPCT: "cmpctblock",
    K_GETTXN: "getblocktxn",
    K_TXN: "blocktxn",
    K_HDR: "header",
    K_QUERY: "query",
    K_CHUNK: "hashchunk",
    K_CODED: "codedchunk",
    K_ACK: "ack",
    K_ABORT: "abort",
}

# CPU stages
ST_FULL = 1
ST_CMPCT = 2
ST_CHUNK = 3
ST_DECODE = 4
ST_HDR = 5


@dataclass
class RunResult:
    scenario: Scenario
    descriptors: Dict[int, BlockDescriptor]
    reception: Dict[int, np.ndarray]       # block id -> absolute time per node
    canonical: set
    stale: set
    excluded: set
    bytes_wire: float
    bytes_payload: float
    bytes_wasted: float
    counters: Dict[str, int]
    accept_time: List[Dict[int, float]]
    end_time: float

    def reception_latency(self, block_id: int) -> np.ndarray:
        d = self.descriptors[block_id]
        return self.reception[block_id] - d.mine_time


def build_topology(sc: Scenario) -> Topology:
    if sc.topology == "linear":
        return linear_topology(sc.node_count, sc.linear_bandwidth_bps,
                               sc.linear_delay_s)
    if sc.topology == "regional":
        table = load_region_table(sc.region_file)
        return generate_topology(sc.node_count, sc.seed, sc.outgoing,
                                 sc.incoming_cap, table)
    raise ValueError(f"unknown topology preset {sc.topology!r}")


class Simulation:
    """One scenario, one seed, one protocol engine, one event queue."""

    def __init__(self, sc: Scenario, topology: Optional[Topology] = None,
                 trace: bool = False):
        from ..protocols import make_engine

        self.sc = sc
        self.topo = topology if topology is not None else build_topology(sc)
        if self.topo.node_count != sc.node_count:
            raise ValueError("topology node count disagrees with scenario")
        n = sc.node_count

        self.now = 0.0
        self._seq = 0
        self.events: list = []
        self.upload_free = [0.0] * n
        self.cpu_free = [0.0] * n
        self.up_bytes_s = [b / 8.0 for b in self.topo.upload_bps]
        self.down_bytes_s = [b / 8.0 for b in self.topo.download_bps]

        self.descriptors: Dict[int, BlockDescriptor] = {}
        self.reception: Dict[int, np.ndarray] = {}
        self.completion_count: Dict[int, int] = {}
        self.chain = ChainView(n)

        self.bytes_wire = 0.0
        self.bytes_payload = 0.0
        self.bytes_wasted = 0.0
        self.counters: Dict[str, int] = {}

        weights = None
        if sc.pinned_miner is not None:
            weights = [0.0] * n
            weights[sc.pinned_miner] = 1.0
        self.schedule = mining_schedule(sc.t_b, sc.block_count, n, sc.seed,
                                        miner_weights=weights)
        self.engine = make_engine(sc.protocol, self)

        self.trace_lines: Optional[List[str]] = [] if trace else None

    # ----- plumbing used by engines -----

    def seq(self) -> int:
        self._seq += 1
        return self._seq

    def count(self, name: str, inc: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + inc

    def wire_bytes(self, payload: float) -> float:
        if payload <= 0:
            return 0.0
        return payload + math.ceil(payload / self.sc.s_ip) * self.sc.s_h

    def send(self, src: int, dst: int, kind: int, blk: int, payload: float,
             aux: int = 0, extra=None, skip_known: bool = False) -> float:
        """Queue one message on src's upload FIFO; returns delivery time.

        skip_known elides the delivery event when the receiver is already
        guaranteed to drop the message (its knowledge of a block only grows),
        but the wire time and bytes are still charged to the sender.
        """
        wire = self.wire_bytes(payload)
        start = self.upload_free[src]
        if start < self.now:
            start = self.now
        if wire > 0.0:
            rate = min(self.up_bytes_s[src], self.down_bytes_s[dst])
            ser = wire / rate
        else:
            ser = 0.0
        self.upload_free[src] = start + ser
        deliver_at = start + ser + self.topo.link_delay(src, dst)
        self.bytes_wire += wire
        self.bytes_payload += payload if payload > 0 else 0.0

        if self.trace_lines is not None:
            self.trace_lines.append(
                f"{deliver_at:.9f} {src} {dst} {KIND_NAMES[kind]} {blk} {wire:.0f}"
            )
        if skip_known and self.engine.knows(dst, blk):
            self.count("send_skipped_known")
            return deliver_at
        heappush(self.events,
                 (deliver_at, self.seq(), EV_DELIVER, kind, blk, src, dst, aux, extra))
        return deliver_at

    def cpu(self, node: int, cost: float, blk: int, stage: int, aux: int = 0) -> float:
        """Queue validation work on the node's CPU FIFO; returns finish time."""
        start = self.cpu_free[node]
        if start < self.now:
            start = self.now
        done = start + cost
        self.cpu_free[node] = done
        heappush(self.events,
                 (done, self.seq(), EV_CPU, stage, blk, node, 0, aux, None))
        return done

    def waste(self, wire: float) -> None:
        self.bytes_wasted += wire

    def mark_reception(self, node: int, blk: int) -> None:
        rec = self.reception[blk]
        if not np.isnan(rec[node]):
            return
        rec[node] = self.now
        c = self.completion_count[blk] + 1
        self.completion_count[blk] = c
        if c == self.sc.node_count:
            self.engine.finalize_block(blk)

    def try_accept(self, node: int, blk: int) -> None:
        self.chain.try_accept(node, blk, self.now)

    # ----- run loop -----

    def _mine(self, index: int) -> None:
        mine_time, miner = self.schedule[index]
        parent_id, parent_h = self.chain.tip(miner)
        desc = make_descriptor(self.sc, index, parent_id, miner,
                               mine_time, parent_h + 1)
        self.descriptors[index] = desc
        self.chain.register_block(index, parent_id, desc.height)
        self.reception[index] = np.full(self.sc.node_count, np.nan)
        self.completion_count[index] = 0
        self.mark_reception(miner, index)
        self.chain.try_accept(miner, index, mine_time)
        self.engine.on_mine(miner, desc, mine_time)

    def run(self) -> RunResult:
        ev = [
            (t, self.seq(), EV_MINE, 0, idx, 0, 0, 0, None)
            for idx, (t, _miner) in enumerate(self.schedule)
        ]
        heapify(ev)
        self.events = ev
        pop = heappop
        events = self.events
        engine = self.engine
        while events:
            t, _, ekind, a, blk, c, d, aux, extra = pop(events)
            self.now = t
            if ekind == EV_DELIVER:
                engine.on_deliver(a, blk, c, d, aux, extra, t)
            elif ekind == EV_CPU:
                engine.on_cpu(c, blk, a, aux, t)
            else:
                self._mine(blk)

        canonical, stale, excluded = classify_stale(self.descriptors)
        return RunResult(
            scenario=self.sc,
            descriptors=self.descriptors,
            reception=self.reception,
            canonical=canonical,
            stale=stale,
            excluded=excluded,
            bytes_wire=self.bytes_wire,
            bytes_payload=self.bytes_payload,
            bytes_wasted=self.bytes_wasted,
            counters=dict(sorted(self.counters.items())),
            accept_time=self.chain.accept_time,
            end_time=self.now,
        )
