"""Run configuration: one Scenario describes one simulation cell.

Scenarios serialize to and from YAML so runs are reproducible from a config
file alone; config_digest() fingerprints the resolved parameters for the run
metadata. Derived quantities (tx count, compact size, validation budget) are
recomputed from the block size law unless explicitly overridden, keeping the
simulator and the closed-form model fed from the same numbers.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, Optional

import yaml

from ..chain import (
    COMPACT_OVERHEAD_BYTES_DEFAULT,
    HEADER_BYTES_DEFAULT,
    SHORT_HASH_BYTES_DEFAULT,
    synthetic_tx_count,
)

PROTOCOLS = ("sr", "cbr", "ct", "coded")

# per-transaction validation cost calibrated so a 1 MiB block (2759 txs)
# costs 100 ms to validate
V_TX_DEFAULT = 0.1 / 2759.0

CONTROL_BYTES_DEFAULT = 61


@dataclass
class Scenario:
    protocol: str = "cbr"
    node_count: int = 500
    block_count: int = 1000
    seed: int = 0
    t_b: float = 600.0
    block_size_bytes: float = 1_048_576.0
    tx_size: float = 380.0
    chunks_k: int = 16
    coded_m: Optional[int] = None      # defaults to chunks_k
    max_seeds: int = 0                 # 0 = no cap on parallel seeds
    coeff_wire: str = "seed"           # "seed" (12 B) or "dense" (M bytes)

    topology: str = "regional"         # "regional" or "linear"
    outgoing: int = 8
    incoming_cap: int = 117
    linear_bandwidth_bps: float = 8e6
    linear_delay_s: float = 0.0
    region_file: Optional[str] = None

    s_ip: float = 1460.0
    s_h: float = 40.0
    control_bytes: float = float(CONTROL_BYTES_DEFAULT)
    header_bytes: float = float(HEADER_BYTES_DEFAULT)
    short_hash_bytes: float = float(SHORT_HASH_BYTES_DEFAULT)
    compact_header_bytes: float = float(COMPACT_OVERHEAD_BYTES_DEFAULT)

    v_tx: float = V_TX_DEFAULT
    header_validation_s: float = 0.0
    v_b_override: Optional[float] = None
    s_cb_override: Optional[float] = None

    missing_tx_rate: float = 0.0
    # block index -> "tx:<hash index>" or "pow"
    invalid_blocks: Dict[int, str] = field(default_factory=dict)
    pinned_miner: Optional[int] = None  # force every block onto one miner

    abstract_sizes: bool = True

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.node_count < 2:
            raise ValueError("need at least 2 nodes")
        if self.chunks_k < 1:
            raise ValueError("chunks_k must be >= 1")
        if self.coeff_wire not in ("seed", "dense"):
            raise ValueError("coeff_wire must be 'seed' or 'dense'")
        if not (0.0 <= self.missing_tx_rate <= 1.0):
            raise ValueError("missing_tx_rate must be in [0, 1]")
        if self.pinned_miner is not None and not (
                0 <= self.pinned_miner < self.node_count):
            raise ValueError("pinned_miner out of range")

    # ----- derived quantities -----

    @property
    def tx_count(self) -> int:
        return synthetic_tx_count(self.block_size_bytes)

    @property
    def compact_bytes(self) -> float:
        if self.s_cb_override is not None:
            return float(self.s_cb_override)
        return self.tx_count * self.short_hash_bytes + self.compact_header_bytes

    @property
    def v_b(self) -> float:
        if self.v_b_override is not None:
            return float(self.v_b_override)
        return self.v_tx * self.tx_count

    @property
    def m(self) -> int:
        return self.coded_m if self.coded_m is not None else self.chunks_k

    # ----- serialization -----

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["invalid_blocks"] = {int(k): v for k, v in self.invalid_blocks.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown scenario fields: {sorted(extra)}")
        if "invalid_blocks" in d and d["invalid_blocks"]:
            d = dict(d)
            d["invalid_blocks"] = {int(k): v for k, v in d["invalid_blocks"].items()}
        return cls(**d)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def from_yaml(cls, text: str) -> "Scenario":
        return cls.from_dict(yaml.safe_load(text))

    def config_digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def replace(self, **kw) -> "Scenario":
        return dataclasses.replace(self, **kw)


def linear_scenario(hops: int, protocol: str, compact_bytes: float,
                    chunks_k: int = 1, v_b: float = 0.0,
                    bandwidth_bps: float = 8e6,
                    block_size_bytes: Optional[float] = None) -> Scenario:
    """Idealized chain preset used as the closed-form oracle fixture.

    Control and header messages are zero bytes and links add no propagation
    delay, so the only costs are payload serialization and validation, which
    is exactly what the closed forms price. hops = n means n+1 nodes.
    """
    return Scenario(
        protocol=protocol,
        node_count=hops + 1,
        block_count=1,
        seed=1,
        t_b=600.0,
        block_size_bytes=float(block_size_bytes if block_size_bytes is not None
                               else compact_bytes),
        chunks_k=chunks_k,
        topology="linear",
        linear_bandwidth_bps=bandwidth_bps,
        linear_delay_s=0.0,
        control_bytes=0.0,
        header_bytes=0.0,
        v_b_override=float(v_b),
        s_cb_override=float(compact_bytes),
        header_validation_s=0.0,
        abstract_sizes=True,
        pinned_miner=0,
    )
