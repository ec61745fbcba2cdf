"""Closed-form throughput, fork, and linear-chain latency models.

All internal arithmetic is bytes and bytes/second; link rate is accepted in
bits/s at the interface and converted once.

Two overhead conventions coexist, on purpose:

- exact: fragmentation overhead is ceil(payload/S_ip)*S_h per transmitted
  unit, the same law the simulator's links apply. latency_sr / latency_cbr /
  latency_ct use it, so linear-chain simulator runs agree with them to float
  accumulation error.
- closed: the smooth textbook form, overhead = (payload/S_ip)*S_h with the
  per-chunk overhead folded to O_cb/k while chunks span multiple packets and
  pinned at one header once a chunk fits a single packet. The *_closed
  functions use it. Only the smooth form has clean monotonicity (latency
  strictly falls in k while fragmented) and exact one-hop degeneracy; the
  exact form wobbles by one header at chunk/packet boundaries.

The two families agree wherever chunks align to whole packets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .chain import (
    COMPACT_OVERHEAD_BYTES_DEFAULT,
    HEADER_BYTES_DEFAULT,
    SHORT_HASH_BYTES_DEFAULT,
    TX_SIZE_DEFAULT,
)

IP_PAYLOAD_BYTES_DEFAULT = 1460.0
IP_HEADER_BYTES_DEFAULT = 40.0


def overhead_bytes(payload_bytes: float, s_ip: float = IP_PAYLOAD_BYTES_DEFAULT,
                   s_h: float = IP_HEADER_BYTES_DEFAULT) -> float:
    """Fragmentation overhead of one transmitted unit: ceil(P/S_ip) headers."""
    if payload_bytes <= 0:
        return 0.0
    return math.ceil(payload_bytes / s_ip) * s_h


@dataclass(frozen=True)
class AnalyticParams:
    """Symbol set for the closed forms; derived sizes are always recomputed.

    Either n_t or s_cb may be given explicitly; each defaults from the other
    (s_cb from the compact-block size law, n_t from the block size). Giving
    s_cb directly supports size-driven studies where a byte budget, not a
    transaction count, is the independent variable.
    """

    s_block: float = 1_048_576.0
    s_transaction: float = float(TX_SIZE_DEFAULT)
    t_b: float = 600.0
    s_ip: float = IP_PAYLOAD_BYTES_DEFAULT
    s_h: float = IP_HEADER_BYTES_DEFAULT
    s_i: float = float(SHORT_HASH_BYTES_DEFAULT)
    s_h_cb: float = float(COMPACT_OVERHEAD_BYTES_DEFAULT)
    header_bytes: float = float(HEADER_BYTES_DEFAULT)
    n_t: Optional[float] = None
    s_cb: Optional[float] = None
    b_bits: float = 8e6
    v_b: float = 0.1
    n: int = 1
    k: int = 1

    def __post_init__(self):
        if self.t_b <= 0 or self.b_bits <= 0:
            raise ValueError("T_B and B must be positive")
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")

    @property
    def b_bytes(self) -> float:
        return self.b_bits / 8.0

    @property
    def tx_count(self) -> float:
        if self.n_t is not None:
            return self.n_t
        if self.s_cb is not None:
            return (self.s_cb - self.s_h_cb) / self.s_i
        return float(math.floor((self.s_block - self.header_bytes) / self.s_transaction))

    @property
    def compact_bytes(self) -> float:
        if self.s_cb is not None:
            return self.s_cb
        return self.tx_count * self.s_i + self.s_h_cb

    @property
    def chunk_bytes(self) -> float:
        return self.compact_bytes / self.k

    @property
    def v_ch(self) -> float:
        return self.v_b / self.k

    @property
    def o_b(self) -> float:
        return overhead_bytes(self.s_block, self.s_ip, self.s_h)

    @property
    def o_cb(self) -> float:
        return overhead_bytes(self.compact_bytes, self.s_ip, self.s_h)

    @property
    def o_ch(self) -> float:
        return overhead_bytes(self.chunk_bytes, self.s_ip, self.s_h)

    @property
    def fragmented(self) -> bool:
        """True when chunks still span multiple packets (k <= S_cb/S_ip)."""
        return self.k <= self.compact_bytes / self.s_ip

    @property
    def o_b_closed(self) -> float:
        return self.s_block / self.s_ip * self.s_h

    @property
    def o_cb_closed(self) -> float:
        return self.compact_bytes / self.s_ip * self.s_h

    @property
    def o_ch_closed(self) -> float:
        if self.fragmented:
            return self.o_cb_closed / self.k
        return self.s_h


def tps(params: AnalyticParams) -> float:
    """Sustained transactions per second for one block per interval."""
    return params.s_block / (params.s_transaction * params.t_b)


def fork_probability(latency_s: float, t_b: float) -> float:
    """Probability that at least one competing block is mined within L."""
    if latency_s < 0:
        raise ValueError("latency must be >= 0")
    if t_b <= 0:
        raise ValueError("T_B must be positive")
    return 1.0 - math.exp(-latency_s / t_b)


def divergence(latency_s: float, t_b: float) -> float:
    """Propagation divergence: latency as a fraction of the block interval."""
    if latency_s < 0:
        raise ValueError("latency must be >= 0")
    if t_b <= 0:
        raise ValueError("T_B must be positive")
    return latency_s / t_b


def latency_sr(p: AnalyticParams) -> float:
    """Full-block store-and-forward latency over an n-hop chain."""
    return p.n * ((p.s_block + p.o_b) / p.b_bytes + p.v_b)


def latency_cbr(p: AnalyticParams) -> float:
    """Compact-block store-and-forward latency over an n-hop chain."""
    return p.n * ((p.compact_bytes + p.o_cb) / p.b_bytes + p.v_b)


def latency_ct(p: AnalyticParams) -> float:
    """Chunk-pipelined compact-block latency over an n-hop chain.

    k chunk stages fill the first hop, then one stage per further hop;
    each stage costs the chunk's wire time plus its validation share.
    """
    stage = (p.chunk_bytes + p.o_ch) / p.b_bytes + p.v_ch
    return (p.k + p.n - 1) * stage


def gain_ct(p: AnalyticParams) -> float:
    """Latency saved by chunk pipelining relative to plain compact relay."""
    return latency_cbr(p) - latency_ct(p)


def latency_sr_closed(p: AnalyticParams) -> float:
    """Smooth-overhead variant of latency_sr."""
    return p.n * ((p.s_block + p.o_b_closed) / p.b_bytes + p.v_b)


def latency_cbr_closed(p: AnalyticParams) -> float:
    """Smooth-overhead variant of latency_cbr."""
    return p.n * ((p.compact_bytes + p.o_cb_closed) / p.b_bytes + p.v_b)


def latency_ct_closed(p: AnalyticParams) -> float:
    """Smooth-overhead variant of latency_ct.

    While chunks are still fragmented this reduces to
    (1 + (n-1)/k) * ((S_cb + O_cb)/B + V_b), which strictly falls in k and
    equals latency_cbr_closed at n = 1 or k = 1.
    """
    stage = (p.chunk_bytes + p.o_ch_closed) / p.b_bytes + p.v_ch
    return (p.k + p.n - 1) * stage


def gain_ct_closed(p: AnalyticParams) -> float:
    """Smooth-overhead variant of gain_ct."""
    return latency_cbr_closed(p) - latency_ct_closed(p)


def gain_ct_fragmented_closed(p: AnalyticParams) -> float:
    """Factored form of the fragmented-regime smooth gain.

    Identical to gain_ct_closed while chunks span multiple packets; it also
    matches the exact-law gain_ct wherever chunks align to whole packets.
    """
    return (1.0 - 1.0 / p.k) * (p.n - 1) * (
        (p.compact_bytes + p.o_cb_closed) / p.b_bytes + p.v_b
    )


def _gain_vector(p: AnalyticParams, ks: np.ndarray) -> np.ndarray:
    """gain_ct evaluated for an integer vector of chunk counts."""
    cb = p.compact_bytes
    b = p.b_bytes
    s_ch = cb / ks
    o_ch = np.ceil(s_ch / p.s_ip) * p.s_h
    stage = (s_ch + o_ch) / b + p.v_b / ks
    l_ct = (ks + p.n - 1) * stage
    return latency_cbr(p) - l_ct


@dataclass(frozen=True)
class OptimalK:
    """Both published and repaired closed forms, plus the scan oracle."""

    k_printed: float
    k_repaired: float
    k_scan: int
    gain_at_scan: float
    gain_at_printed: float
    gain_at_repaired: float
    printed_consistent: bool
    repaired_consistent: bool
    single_packet_at_optimum: bool


def optimal_k(p: AnalyticParams, scan_max: int = 10**6) -> OptimalK:
    """Best integer chunk count by exhaustive scan, with closed-form checks.

    The printed closed form adds seconds to bytes under the radical; it is
    evaluated verbatim (B in bits/s as given) and reported alongside a
    dimensionally consistent variant sqrt((n-1)(S_cb + B*V_b)/S_h) with B in
    bytes/s. The scan is the oracle; the flags say whether each closed form
    lands near it.
    """
    k_printed = math.sqrt(p.b_bits * max(p.n - 1, 0) * (p.v_b + p.compact_bytes) / p.s_h)
    k_repaired = math.sqrt(max(p.n - 1, 0) * (p.compact_bytes + p.b_bytes * p.v_b) / p.s_h)

    ks = np.arange(1, scan_max + 1, dtype=np.float64)
    gains = _gain_vector(p, ks)
    best = int(np.argmax(gains))
    k_scan = best + 1
    gain_at_scan = float(gains[best])

    def gain_at(k_val: float) -> float:
        k_int = max(1, int(round(k_val)))
        return float(_gain_vector(p, np.array([k_int], dtype=np.float64))[0])

    def near(k_val: float) -> bool:
        return abs(round(k_val) - k_scan) <= max(1.0, 0.02 * k_scan)

    return OptimalK(
        k_printed=k_printed,
        k_repaired=k_repaired,
        k_scan=k_scan,
        gain_at_scan=gain_at_scan,
        gain_at_printed=gain_at(k_printed),
        gain_at_repaired=gain_at(k_repaired),
        printed_consistent=near(k_printed),
        repaired_consistent=near(k_repaired),
        single_packet_at_optimum=k_scan > p.compact_bytes / p.s_ip,
    )


def with_params(p: AnalyticParams, **overrides) -> AnalyticParams:
    """Functional update helper used by the CLI sweep."""
    return replace(p, **overrides)
