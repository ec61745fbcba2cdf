"""Per-node relay state machines, one engine per protocol.

Engines are single-threaded and deterministic. They hold per-node, per-block
state dicts; the event loop calls on_mine / on_deliver / on_cpu and the
engines reply through the simulator's send and cpu primitives. Knowledge of a
block at a node only ever grows, which lets the sender-side dedup skip elide
deliveries destined to be dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..netsim import sim as ev


@dataclass(frozen=True)
class Message:
    """Public record form of a wire message, as used by trace tooling."""

    kind: str
    block_id: int
    src: int
    dst: int
    wire_bytes: float
    time_s: float


def parse_trace_line(line: str) -> Message:
    """Parse one trace line: time src dst kind block bytes."""
    t, src, dst, kind, blk, size = line.split()
    return Message(kind=kind, block_id=int(blk), src=int(src), dst=int(dst),
                   wire_bytes=float(size), time_s=float(t))


class Engine:
    """Shared plumbing: per-node block state plus the done-sweep."""

    def __init__(self, sim):
        self.sim = sim
        self.sc = sim.sc
        self.topo = sim.topo
        n = sim.sc.node_count
        self.state = [dict() for _ in range(n)]
        self.done = [set() for _ in range(n)]

    def knows(self, node: int, blk: int) -> bool:
        return blk in self.state[node] or blk in self.done[node]

    def finalize_block(self, blk: int) -> None:
        """Drop per-block state once every node holds the block."""
        for node in range(self.sc.node_count):
            self.state[node].pop(blk, None)
            self.done[node].add(blk)

    # engine hooks
    def on_mine(self, miner: int, desc, now: float) -> None:
        raise NotImplementedError

    def on_deliver(self, kind: int, blk: int, src: int, dst: int,
                   aux: int, extra, now: float) -> None:
        raise NotImplementedError

    def on_cpu(self, node: int, blk: int, stage: int, aux: int,
               now: float) -> None:
        raise NotImplementedError

    # shared helpers

    def partial_validation_cost(self, desc) -> float:
        """Cost of a full validation that stops at the first bad transaction."""
        if desc.invalid_tx_index < 0 or desc.tx_count <= 0:
            return desc.v_b
        return desc.v_b * (desc.invalid_tx_index + 1) / desc.tx_count


def tx_fetch_bytes(missing_count: int, tx_size: float,
                   control_bytes: float) -> tuple:
    """Bytes added by a missing-transaction round trip.

    Returns (request_payload, response_payload): one control-sized request
    plus the missing transactions themselves on the way back. Zero missing
    means no round trip at all.
    """
    if missing_count < 0:
        raise ValueError("missing_count must be >= 0")
    if missing_count == 0:
        return (0.0, 0.0)
    return (control_bytes, missing_count * tx_size)


def make_engine(protocol: str, sim) -> Engine:
    from .standard import StoreForwardEngine, CompactRelayEngine
    from .cutthrough import CutThroughEngine
    from .coded import CodedEngine

    table = {
        "sr": StoreForwardEngine,
        "cbr": CompactRelayEngine,
        "ct": CutThroughEngine,
        "coded": CodedEngine,
    }
    if protocol not in table:
        raise ValueError(f"unknown protocol {protocol!r}")
    return table[protocol](sim)


__all__ = [
    "Engine",
    "Message",
    "parse_trace_line",
    "tx_fetch_bytes",
    "make_engine",
    "ev",
]
