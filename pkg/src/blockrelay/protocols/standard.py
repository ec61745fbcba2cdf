"""Store-and-forward relay (full blocks) and compact-block relay.

Both follow announce/request/serve: a node validates a block in full before
announcing onward, so each hop costs one full serialization plus one full
validation. Compact relay only ships short hashes and, when the local pool is
missing transactions, adds one fetch round trip before validating.
"""

from __future__ import annotations

import numpy as np

from ..netsim.sim import (
    K_INV, K_GETDATA, K_FULL, K_GETCMPCT, K_CMPCT, K_GETTXN, K_TXN,
    ST_FULL, ST_CMPCT,
)
from . import Engine, tx_fetch_bytes


class _AnnounceRequestEngine(Engine):
    """Common inv/request/serve skeleton; subclasses pick the payload."""

    REQUEST_KIND = K_GETDATA
    PAYLOAD_KIND = K_FULL
    VALIDATE_STAGE = ST_FULL

    def payload_bytes(self, desc) -> float:
        raise NotImplementedError

    def on_mine(self, miner, desc, now):
        self.state[miner][desc.block_id] = {"have": True, "src": -1}
        for nb in self.topo.neighbors[miner]:
            self.sim.send(miner, nb, K_INV, desc.block_id,
                          self.sc.control_bytes, skip_known=True)

    def on_deliver(self, kind, blk, src, dst, aux, extra, now):
        sim = self.sim
        if kind == K_INV:
            if self.knows(dst, blk):
                sim.count("inv_duplicate")
                return
            self.state[dst][blk] = {"have": False, "src": src}
            sim.send(dst, src, self.REQUEST_KIND, blk, self.sc.control_bytes)
        elif kind == self.REQUEST_KIND:
            st = self.state[dst].get(blk)
            if (st is None or not st["have"]) and blk not in self.done[dst]:
                sim.count("request_unserved")
                return
            desc = sim.descriptors[blk]
            sim.send(dst, src, self.PAYLOAD_KIND, blk, self.payload_bytes(desc))
        elif kind == self.PAYLOAD_KIND:
            self._on_payload(blk, src, dst, now)
        else:
            self._on_other(kind, blk, src, dst, aux, extra, now)

    def _on_payload(self, blk, src, dst, now):
        sim = self.sim
        st = self.state[dst].get(blk)
        if st is None or st["have"]:
            sim.count("payload_duplicate")
            return
        desc = sim.descriptors[blk]
        if not desc.pow_valid:
            st["rejected"] = True
            sim.count("pow_rejected")
            return
        sim.cpu(dst, self.partial_validation_cost(desc), blk, self.VALIDATE_STAGE)

    def _on_other(self, kind, blk, src, dst, aux, extra, now):
        self.sim.count("unexpected_message")

    def on_cpu(self, node, blk, stage, aux, now):
        sim = self.sim
        if stage != self.VALIDATE_STAGE:
            sim.count("unexpected_cpu_stage")
            return
        st = self.state[node].get(blk)
        if st is None:
            return
        desc = sim.descriptors[blk]
        if desc.has_invalid_tx:
            st["rejected"] = True
            sim.count("invalid_tx_rejected")
            return
        st["have"] = True
        sim.mark_reception(node, blk)
        sim.try_accept(node, blk)
        for nb in self.topo.neighbors[node]:
            if nb != st["src"]:
                sim.send(node, nb, K_INV, blk, self.sc.control_bytes,
                         skip_known=True)


class StoreForwardEngine(_AnnounceRequestEngine):
    """Full blocks on the wire; the baseline protocol."""

    REQUEST_KIND = K_GETDATA
    PAYLOAD_KIND = K_FULL
    VALIDATE_STAGE = ST_FULL

    def payload_bytes(self, desc) -> float:
        return desc.full_bytes


class CompactRelayEngine(_AnnounceRequestEngine):
    """Short-hash compact blocks, with an optional missing-tx round trip."""

    REQUEST_KIND = K_GETCMPCT
    PAYLOAD_KIND = K_CMPCT
    VALIDATE_STAGE = ST_CMPCT

    def payload_bytes(self, desc) -> float:
        return desc.compact_bytes

    def missing_tx_count(self, blk: int, node: int, tx_count: int) -> int:
        rate = self.sc.missing_tx_rate
        if rate <= 0.0 or tx_count <= 0:
            return 0
        ss = np.random.SeedSequence([self.sc.seed & 0x7FFFFFFF, blk, node, 71])
        return int(np.random.Generator(np.random.PCG64(ss)).binomial(tx_count, rate))

    def _on_payload(self, blk, src, dst, now):
        sim = self.sim
        st = self.state[dst].get(blk)
        if st is None or st["have"]:
            sim.count("payload_duplicate")
            return
        desc = sim.descriptors[blk]
        if not desc.pow_valid:
            st["rejected"] = True
            sim.count("pow_rejected")
            return
        missing = self.missing_tx_count(blk, dst, desc.tx_count)
        if missing > 0:
            st["missing"] = missing
            sim.count("tx_fetch_round_trips")
            req, _resp = tx_fetch_bytes(missing, self.sc.tx_size,
                                        self.sc.control_bytes)
            sim.send(dst, src, K_GETTXN, blk, req, aux=missing)
        else:
            sim.cpu(dst, self.partial_validation_cost(desc), blk, ST_CMPCT)

    def _on_other(self, kind, blk, src, dst, aux, extra, now):
        sim = self.sim
        if kind == K_GETTXN:
            st = self.state[dst].get(blk)
            if (st is None or not st["have"]) and blk not in self.done[dst]:
                sim.count("request_unserved")
                return
            _req, resp = tx_fetch_bytes(aux, self.sc.tx_size,
                                        self.sc.control_bytes)
            sim.send(dst, src, K_TXN, blk, resp, aux=aux)
        elif kind == K_TXN:
            st = self.state[dst].get(blk)
            if st is None or st["have"]:
                sim.count("payload_duplicate")
                return
            desc = sim.descriptors[blk]
            sim.cpu(dst, self.partial_validation_cost(desc), blk, ST_CMPCT)
        else:
            sim.count("unexpected_message")
