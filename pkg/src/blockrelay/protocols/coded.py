"""Coded cut-through relay: rateless coded chunks from many seeds at once.

Every header offer names a potential seed. A node queries each offerer it
hears about (up to an optional cap) and each seed streams coded chunks,
one in flight per session. Received vectors that raise the decoder's rank
are stored and re-served downstream immediately, so a node seeds others
before it can decode. At full rank the node decodes, acks every seed it
queried, re-announces the header, and runs block validation; the ack tells
seeds to stop, and anything that was already in flight counts as waste.
"""

from __future__ import annotations

from ..coding import rlnc
from ..netsim.sim import K_HDR, K_QUERY, K_CODED, K_ACK, ST_DECODE
from . import Engine


class CodedEngine(Engine):
    def on_mine(self, miner, desc, now):
        self.state[miner][desc.block_id] = {
            "complete": True, "decoded": True, "rejected": False,
            "dec": None, "recv": [], "queried": [], "acked_by": set(),
            "fresh": 0, "sess": {},
        }
        for nb in self.topo.neighbors[miner]:
            self.sim.send(miner, nb, K_HDR, desc.block_id,
                          desc.header_wire_bytes)

    def _new_state(self, desc):
        payload_len = len(desc.coded_sources[0]) if desc.coded_sources else 0
        return {
            "complete": False, "decoded": False, "rejected": False,
            "dec": rlnc.DecoderState(desc.coded_m, payload_len),
            "recv": [], "queried": [], "acked_by": set(),
            "fresh": 0, "sess": {},
        }

    def _query(self, node, src, blk, st):
        st["queried"].append(src)
        self.sim.send(node, src, K_QUERY, blk, self.sc.control_bytes)

    # ----- sending side -----

    def _try_send(self, seed, peer, st, blk):
        ent = st["sess"][peer]
        if ent[1] or peer in st["acked_by"] or st["rejected"]:
            return
        desc = self.sim.descriptors[blk]
        if st["decoded"]:
            coeffs = rlnc.next_coefficients(
                (blk, self._stream_node(seed, st)), st["fresh"], desc.coded_m)
            st["fresh"] += 1
            payload = (rlnc.encode(desc.coded_sources, coeffs).payload
                       if desc.coded_sources else None)
        else:
            i = ent[0]
            if i >= len(st["recv"]):
                return
            ent[0] = i + 1
            coeffs, payload = st["recv"][i]
        ent[1] = True
        self.sim.send(seed, peer, K_CODED, blk, desc.coded_chunk_wire(),
                      extra=(coeffs, payload))

    def _stream_node(self, seed, st):
        # fresh draws are keyed by the node that first decoded them, so a
        # relay serving fresh vectors after its own decode stays distinct
        # from the miner's stream
        return seed

    # ----- events -----

    def on_deliver(self, kind, blk, src, dst, aux, extra, now):
        sim = self.sim
        if kind == K_HDR:
            desc = sim.descriptors[blk]
            st = self.state[dst].get(blk)
            if st is None:
                if blk in self.done[dst]:
                    sim.count("header_duplicate")
                    return
                if not desc.pow_valid:
                    self.state[dst][blk] = {
                        "complete": True, "decoded": False, "rejected": True,
                        "dec": None, "recv": [], "queried": [],
                        "acked_by": set(), "fresh": 0, "sess": {},
                    }
                    sim.count("pow_rejected")
                    return
                st = self._new_state(desc)
                self.state[dst][blk] = st
                for nb in self.topo.neighbors[dst]:
                    if nb != src:
                        sim.send(dst, nb, K_HDR, blk, desc.header_wire_bytes)
                self._query(dst, src, blk, st)
                return
            if st["complete"] or st["rejected"]:
                return
            if src in st["queried"]:
                sim.count("header_duplicate")
                return
            cap = self.sc.max_seeds
            if cap and len(st["queried"]) >= cap:
                sim.count("seed_cap_hit")
                return
            self._query(dst, src, blk, st)
        elif kind == K_QUERY:
            st = self.state[dst].get(blk)
            if st is None:
                sim.count("query_unknown")
                return
            if st["rejected"]:
                sim.count("query_rejected_block")
                return
            if src in st["acked_by"]:
                sim.count("query_after_ack")
                return
            if src in st["sess"]:
                sim.count("query_duplicate")
                return
            st["sess"][src] = [0, False]
            self._try_send(dst, src, st, blk)
        elif kind == K_CODED:
            self._on_coded(blk, src, dst, extra, now)
        elif kind == K_ACK:
            st = self.state[dst].get(blk)
            if st is None:
                sim.count("ack_unknown")
                return
            st["acked_by"].add(src)
            st["sess"].pop(src, None)
        else:
            sim.count("unexpected_message")

    def _on_coded(self, blk, src, dst, extra, now):
        sim = self.sim
        desc = sim.descriptors[blk]
        wire = sim.wire_bytes(desc.coded_chunk_wire())
        st = self.state[dst].get(blk)
        if st is None:
            sim.waste(wire)
            sim.count("chunk_dropped")
            return
        if st["complete"]:
            sim.waste(wire)
            sim.count("post_ack_chunk")
            return
        if st["rejected"]:
            sim.count("chunk_dropped")
            return
        coeffs, payload = extra
        before = st["dec"].rank
        st["dec"].add(coeffs, payload)
        if st["dec"].rank > before:
            st["recv"].append((coeffs, payload))
            for peer in st["sess"]:
                self._try_send(dst, peer, st, blk)
        else:
            sim.waste(wire)
            sim.count("redundant_chunk")
        if st["dec"].rank >= desc.coded_m:
            if desc.coded_sources:
                # byte mode carries real payloads: decode and verify content
                if st["dec"].decode() != desc.coded_sources:
                    raise RuntimeError(
                        f"decode mismatch at node {dst} block {blk}")
                sim.count("decode_verified")
            st["complete"] = True
            sim.mark_reception(dst, blk)
            for peer in st["queried"]:
                sim.send(dst, peer, K_ACK, blk, self.sc.control_bytes)
            st["decoded"] = True
            for nb in self.topo.neighbors[dst]:
                sim.send(dst, nb, K_HDR, blk, desc.header_wire_bytes)
            sim.cpu(dst, self.partial_validation_cost(desc), blk, ST_DECODE)
            return
        # one-in-flight pacing: tell the sender this slot is free again
        seed_st = self.state[src].get(blk)
        if seed_st is not None and dst in seed_st["sess"]:
            seed_st["sess"][dst][1] = False
            self._try_send(src, dst, seed_st, blk)

    def on_cpu(self, node, blk, stage, aux, now):
        if stage != ST_DECODE:
            return
        # state may already be swept if this was the last node to finish,
        # so acceptance must not depend on it
        desc = self.sim.descriptors[blk]
        if desc.has_invalid_tx or not desc.pow_valid:
            st = self.state[node].get(blk)
            if st is not None:
                st["rejected"] = True
            self.sim.count("invalid_block_dropped")
            return
        self.sim.try_accept(node, blk)
