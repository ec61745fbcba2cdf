"""Chain data types: blocks, compact blocks, hash chunks, validity model.

Proof-of-work is never computed here. Validity is a scenario-assigned flag
plus a configured time cost, which is all the relay model needs. Sizes are
byte-exact: a compact block is N_t short hashes plus a fixed overhead, and
hash chunks carry only hashes (the 80-byte header travels separately in the
protocols that stream chunks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

TX_SIZE_DEFAULT = 380
HEADER_BYTES_DEFAULT = 80
SHORT_HASH_BYTES_DEFAULT = 6
COMPACT_OVERHEAD_BYTES_DEFAULT = 80

_SHORT_HASH_MASK = (1 << (8 * SHORT_HASH_BYTES_DEFAULT)) - 1


@dataclass(frozen=True)
class Transaction:
    id: int
    size_bytes: int = TX_SIZE_DEFAULT
    valid: bool = True

    def __post_init__(self):
        if self.size_bytes <= 0:
            raise ValueError("transaction size must be positive")

    @property
    def short_hash(self) -> int:
        return self.id & _SHORT_HASH_MASK


@dataclass(frozen=True)
class BlockHeader:
    block_id: int
    prev_id: int
    height: int
    miner: int
    pow_valid: bool = True
    merkle_root: int = 0
    nonce: int = 0
    target: int = 0
    size_bytes: int = HEADER_BYTES_DEFAULT


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    txs: tuple[Transaction, ...] = ()

    @property
    def size_bytes(self) -> int:
        return self.header.size_bytes + sum(t.size_bytes for t in self.txs)

    @property
    def tx_count(self) -> int:
        return len(self.txs)


@dataclass(frozen=True)
class CompactBlock:
    header: BlockHeader
    short_hashes: tuple[int, ...]
    short_hash_bytes: int = SHORT_HASH_BYTES_DEFAULT
    header_overhead_bytes: int = COMPACT_OVERHEAD_BYTES_DEFAULT

    @property
    def size_bytes(self) -> int:
        return len(self.short_hashes) * self.short_hash_bytes + self.header_overhead_bytes


@dataclass(frozen=True)
class HashChunk:
    block_id: int
    index: int
    hashes: tuple[int, ...]
    short_hash_bytes: int = SHORT_HASH_BYTES_DEFAULT

    @property
    def size_bytes(self) -> int:
        return len(self.hashes) * self.short_hash_bytes

    def payload_bytes(self) -> bytes:
        """Packed hash bytes, the source symbols handed to the coder."""
        w = self.short_hash_bytes
        return b"".join(h.to_bytes(w, "big") for h in self.hashes)


def synthetic_tx_count(
    block_size_bytes: int,
    header_bytes: int = HEADER_BYTES_DEFAULT,
    tx_size: int = TX_SIZE_DEFAULT,
) -> int:
    """How many fixed-size transactions fit a target block size."""
    if block_size_bytes < header_bytes:
        return 0
    return (block_size_bytes - header_bytes) // tx_size


def make_block(
    block_id: int,
    prev_id: int,
    height: int,
    miner: int,
    target_size_bytes: int,
    tx_size: int = TX_SIZE_DEFAULT,
    header_bytes: int = HEADER_BYTES_DEFAULT,
    pow_valid: bool = True,
    invalid_tx_index: Optional[int] = None,
    first_tx_id: int = 1,
) -> Block:
    """Synthesize a block of fixed-size transactions near a target size.

    Actual size is header + N_t * tx_size with N_t floored, so it can fall
    short of the target by up to one transaction.
    """
    n = synthetic_tx_count(target_size_bytes, header_bytes, tx_size)
    txs = tuple(
        Transaction(id=first_tx_id + i, size_bytes=tx_size, valid=(i != invalid_tx_index))
        for i in range(n)
    )
    header = BlockHeader(
        block_id=block_id,
        prev_id=prev_id,
        height=height,
        miner=miner,
        pow_valid=pow_valid,
        size_bytes=header_bytes,
    )
    return Block(header=header, txs=txs)


def make_compact(
    block: Block,
    short_hash_bytes: int = SHORT_HASH_BYTES_DEFAULT,
    compact_header_bytes: int = COMPACT_OVERHEAD_BYTES_DEFAULT,
) -> CompactBlock:
    """Compact form of a block: one short hash per transaction, in tx order."""
    mask = (1 << (8 * short_hash_bytes)) - 1
    return CompactBlock(
        header=block.header,
        short_hashes=tuple(t.id & mask for t in block.txs),
        short_hash_bytes=short_hash_bytes,
        header_overhead_bytes=compact_header_bytes,
    )


def chunk(cb: CompactBlock, hashes_per_chunk: int) -> list[HashChunk]:
    """Split a compact block's hash list into relay units of M hashes each."""
    if hashes_per_chunk < 1:
        raise ValueError("hashes_per_chunk must be >= 1")
    hashes = cb.short_hashes
    out = []
    for i in range(0, len(hashes), hashes_per_chunk):
        out.append(
            HashChunk(
                block_id=cb.header.block_id,
                index=len(out),
                hashes=hashes[i : i + hashes_per_chunk],
                short_hash_bytes=cb.short_hash_bytes,
            )
        )
    return out


def reassemble(chunks: Sequence[HashChunk]) -> tuple[int, ...]:
    """Concatenate chunks in index order back into the full hash list."""
    ordered = sorted(chunks, key=lambda c: c.index)
    out: list[int] = []
    for c in ordered:
        out.extend(c.hashes)
    return tuple(out)


def validate_header(h: BlockHeader, cost_s: float = 0.0) -> tuple[bool, float]:
    """Provisional header check: the validity flag plus the configured cost.

    Duplicate-suppression (discard a header already pooled) is an engine
    concern, not a header property.
    """
    return h.pow_valid, cost_s


@dataclass(frozen=True)
class ChunkValidation:
    status: str  # "ok" | "invalid" | "missing"
    cost_s: float
    invalid_at: Optional[int] = None
    missing: tuple[int, ...] = ()


def validate_chunk(
    ch: HashChunk,
    local_txs: Mapping[int, Transaction],
    per_tx_cost_s: float = 0.0,
) -> ChunkValidation:
    """Check a chunk against locally held transactions (keyed by short hash).

    Missing transactions are reported without charging validation time; the
    fetch itself is a transport concern. An invalid transaction stops the
    scan and reports its index so the caller can abort upstream.
    """
    missing = tuple(h for h in ch.hashes if h not in local_txs)
    if missing:
        return ChunkValidation(status="missing", cost_s=0.0, missing=missing)
    for i, h in enumerate(ch.hashes):
        if not local_txs[h].valid:
            return ChunkValidation(
                status="invalid", cost_s=per_tx_cost_s * (i + 1), invalid_at=i
            )
    return ChunkValidation(status="ok", cost_s=per_tx_cost_s * len(ch.hashes))
