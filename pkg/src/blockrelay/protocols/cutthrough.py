"""Cut-through compact relay: validated hash chunks stream hop by hop.

A node learns of a block from the first header it sees, queries that single
sender, and receives chunks one at a time: the next chunk leaves the seed
only once the previous one has been validated at the receiver (the pacing
signal itself is free, standing in for transport backpressure). Each chunk is
forwarded onward as soon as it validates, so hops overlap instead of
stacking. A bad transaction aborts the stream and the abort cascades to
everyone downstream.
"""

from __future__ import annotations

from ..netsim.sim import K_HDR, K_QUERY, K_CHUNK, K_ABORT, ST_CHUNK, ST_HDR
from . import Engine


class CutThroughEngine(Engine):
    def on_mine(self, miner, desc, now):
        k = len(desc.ct_chunk_bytes)
        self.state[miner][desc.block_id] = {
            "seed": -1, "validated": k, "aborted": False, "sess": {},
        }
        for nb in self.topo.neighbors[miner]:
            self.sim.send(miner, nb, K_HDR, desc.block_id,
                          desc.header_wire_bytes, skip_known=True)

    # ----- sending side -----

    def _try_send(self, seed, peer, st, blk):
        ent = st["sess"][peer]
        if ent[1] or st["aborted"]:
            return
        i = ent[0]
        desc = self.sim.descriptors[blk]
        if i >= len(desc.ct_chunk_bytes):
            return
        if i < st["validated"]:
            ent[0] = i + 1
            ent[1] = True
            self.sim.send(seed, peer, K_CHUNK, blk, desc.ct_chunk_bytes[i], aux=i)

    # ----- events -----

    def on_deliver(self, kind, blk, src, dst, aux, extra, now):
        sim = self.sim
        if kind == K_HDR:
            if self.knows(dst, blk):
                sim.count("header_duplicate")
                return
            desc = sim.descriptors[blk]
            if not desc.pow_valid:
                self.state[dst][blk] = {"seed": src, "validated": 0,
                                        "aborted": True, "sess": {}}
                sim.count("pow_rejected")
                return
            if self.sc.header_validation_s > 0.0:
                self.state[dst][blk] = {"seed": src, "validated": 0,
                                        "aborted": False, "sess": {},
                                        "hdr_pending": True}
                sim.cpu(dst, self.sc.header_validation_s, blk, ST_HDR, aux=src)
                return
            self._header_accepted(dst, src, blk)
        elif kind == K_QUERY:
            st = self.state[dst].get(blk)
            if st is None:
                sim.count("query_unknown")
                return
            if st["aborted"]:
                sim.count("query_aborted")
                return
            if src in st["sess"]:
                sim.count("query_duplicate")
                return
            st["sess"][src] = [0, False]
            self._try_send(dst, src, st, blk)
        elif kind == K_CHUNK:
            st = self.state[dst].get(blk)
            if st is None or st["aborted"]:
                sim.count("chunk_dropped")
                return
            desc = sim.descriptors[blk]
            sim.cpu(dst, desc.ct_chunk_cost[aux], blk, ST_CHUNK, aux=aux)
        elif kind == K_ABORT:
            st = self.state[dst].get(blk)
            if st is None or st["aborted"]:
                sim.count("abort_dropped")
                return
            self._abort(dst, blk, st)
            sim.count("abort_cascaded")
        else:
            sim.count("unexpected_message")

    def _header_accepted(self, node, src, blk):
        st = {"seed": src, "validated": 0, "aborted": False, "sess": {}}
        self.state[node][blk] = st
        desc = self.sim.descriptors[blk]
        for nb in self.topo.neighbors[node]:
            if nb != src:
                self.sim.send(node, nb, K_HDR, blk, desc.header_wire_bytes,
                              skip_known=True)
        self.sim.send(node, src, K_QUERY, blk, self.sc.control_bytes)

    def _abort(self, node, blk, st):
        st["aborted"] = True
        for peer in list(st["sess"]):
            self.sim.send(node, peer, K_ABORT, blk, self.sc.control_bytes)
        st["sess"].clear()

    def on_cpu(self, node, blk, stage, aux, now):
        sim = self.sim
        st = self.state[node].get(blk)
        if st is None:
            return
        if stage == ST_HDR:
            if st.pop("hdr_pending", False) and not st["aborted"]:
                src = aux
                del self.state[node][blk]
                self._header_accepted(node, src, blk)
            return
        if stage != ST_CHUNK or st["aborted"]:
            return
        desc = sim.descriptors[blk]
        i = aux
        if desc.invalid_ct_chunk == i:
            self._abort(node, blk, st)
            sim.count("invalid_chunk_aborted")
            return
        st["validated"] = i + 1
        for peer in st["sess"]:
            self._try_send(node, peer, st, blk)
        k = len(desc.ct_chunk_bytes)
        if i + 1 == k:
            sim.mark_reception(node, blk)
            sim.try_accept(node, blk)
        else:
            seed = st["seed"]
            if seed >= 0:
                seed_st = self.state[seed].get(blk)
                if seed_st is not None and node in seed_st["sess"]:
                    seed_st["sess"][node][1] = False
                    self._try_send(seed, node, seed_st, blk)
