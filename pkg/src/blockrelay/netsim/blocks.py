"""Per-block relay descriptors.

A descriptor carries everything the engines need to price and route one
block: wire sizes, chunk plans, validation budgets, and validity flags. In
abstract mode only sizes exist (big-block runs); in byte mode real blocks,
compact blocks and chunk payloads are synthesized so decoding can be checked
byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .. import chain
from ..coding import rlnc
from .scenario import Scenario


@dataclass
class BlockDescriptor:
    block_id: int
    parent_id: int
    miner: int
    mine_time: float
    height: int

    full_bytes: float
    compact_bytes: float
    header_wire_bytes: float
    tx_count: int
    v_b: float

    pow_valid: bool = True
    invalid_tx_index: int = -1

    # cut-through plan
    ct_chunk_bytes: List[float] = field(default_factory=list)
    ct_chunk_cost: List[float] = field(default_factory=list)
    invalid_ct_chunk: int = -1

    # coded plan
    coded_m: int = 1
    coded_chunk_payload: float = 0.0
    coeff_wire_bytes: float = float(rlnc.COEFF_SEED_WIRE_BYTES)

    # byte mode payloads (None in abstract mode)
    block: Optional[chain.Block] = None
    compact: Optional[chain.CompactBlock] = None
    hash_chunks: Optional[List[chain.HashChunk]] = None
    coded_sources: Optional[List[bytes]] = None

    @property
    def has_invalid_tx(self) -> bool:
        return self.invalid_tx_index >= 0

    def coded_chunk_wire(self) -> float:
        """Wire payload of one coded chunk: frame + coefficients + symbols."""
        return rlnc.CODED_FRAME_BYTES + self.coeff_wire_bytes + self.coded_chunk_payload


def _parse_injection(tag: Optional[str], tx_count: int):
    """Injection tags: "pow" or "tx:<hash index>"."""
    if tag is None:
        return True, -1
    if tag == "pow":
        return False, -1
    if tag.startswith("tx:"):
        idx = int(tag[3:])
        if tx_count <= 0:
            raise ValueError("cannot inject an invalid tx into an empty block")
        return True, min(idx, tx_count - 1)
    raise ValueError(f"unknown injection tag {tag!r}")


def make_descriptor(sc: Scenario, block_id: int, parent_id: int, miner: int,
                    mine_time: float, height: int) -> BlockDescriptor:
    tag = sc.invalid_blocks.get(block_id)
    k = sc.chunks_k
    m = sc.m

    if sc.abstract_sizes:
        n_t = sc.tx_count
        pow_valid, bad_tx = _parse_injection(tag, n_t)
        s_cb = sc.compact_bytes
        chunk_b = s_cb / k
        v_b = sc.v_b
        d = BlockDescriptor(
            block_id=block_id, parent_id=parent_id, miner=miner,
            mine_time=mine_time, height=height,
            full_bytes=float(sc.block_size_bytes),
            compact_bytes=float(s_cb),
            header_wire_bytes=float(sc.header_bytes),
            tx_count=n_t,
            v_b=float(v_b),
            pow_valid=pow_valid,
            invalid_tx_index=bad_tx,
            ct_chunk_bytes=[chunk_b] * k,
            ct_chunk_cost=[v_b / k] * k,
            coded_m=m,
            coded_chunk_payload=s_cb / m,
            coeff_wire_bytes=float(m if sc.coeff_wire == "dense"
                                   else rlnc.COEFF_SEED_WIRE_BYTES),
        )
        if bad_tx >= 0 and n_t > 0:
            d.invalid_ct_chunk = min(bad_tx * k // n_t, k - 1)
        return d

    # byte mode: synthesize real content
    n_t = chain.synthetic_tx_count(int(sc.block_size_bytes),
                                   int(sc.header_bytes), int(sc.tx_size))
    pow_valid, bad_tx = _parse_injection(tag, n_t)
    blk = chain.make_block(
        block_id=block_id, prev_id=parent_id, height=height, miner=miner,
        target_size_bytes=int(sc.block_size_bytes),
        tx_size=int(sc.tx_size),
        header_bytes=int(sc.header_bytes),
        pow_valid=pow_valid,
        invalid_tx_index=bad_tx if bad_tx >= 0 else None,
        first_tx_id=1 + (block_id << 32),
    )
    cb = chain.make_compact(blk)
    per_ct = max(1, math.ceil(n_t / k)) if n_t else 1
    chunks = chain.chunk(cb, per_ct) if n_t else []
    per_m = max(1, math.ceil(n_t / m)) if n_t else 1
    coded_chunks = chain.chunk(cb, per_m) if n_t else []
    sources = rlnc.pad_chunks([c.payload_bytes() for c in coded_chunks]) if coded_chunks else []

    v_b = sc.v_b_override if sc.v_b_override is not None else sc.v_tx * n_t
    d = BlockDescriptor(
        block_id=block_id, parent_id=parent_id, miner=miner,
        mine_time=mine_time, height=height,
        full_bytes=float(blk.size_bytes),
        compact_bytes=float(cb.size_bytes),
        header_wire_bytes=float(sc.header_bytes),
        tx_count=n_t,
        v_b=float(v_b),
        pow_valid=pow_valid,
        invalid_tx_index=bad_tx,
        ct_chunk_bytes=[float(c.size_bytes) for c in chunks],
        ct_chunk_cost=[(v_b / n_t) * len(c.hashes) if n_t else 0.0 for c in chunks],
        coded_m=len(sources) if sources else 1,
        coded_chunk_payload=float(len(sources[0]) if sources else 0.0),
        coeff_wire_bytes=float((len(sources) if sources else 1)
                               if sc.coeff_wire == "dense"
                               else rlnc.COEFF_SEED_WIRE_BYTES),
        block=blk,
        compact=cb,
        hash_chunks=chunks,
        coded_sources=sources,
    )
    if bad_tx >= 0 and chunks:
        d.invalid_ct_chunk = bad_tx // per_ct
    return d
