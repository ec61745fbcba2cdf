"""Per-node chain state and end-of-run stale classification.

Acceptance is parent-gated: a node can only extend with a block whose parent
it has already accepted; early arrivals wait in a pending pool and cascade in
when the parent lands. Tips follow the longest-chain rule with first-accepted
tie-breaking. Stale labels are assigned once, after the run drains, against a
globally deterministic canonical chain.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Set, Tuple

GENESIS_ID = -1


class ChainView:
    def __init__(self, node_count: int):
        self.node_count = node_count
        # genesis is implicitly accepted everywhere at height 0
        self.tip_id: List[int] = [GENESIS_ID] * node_count
        self.tip_height: List[int] = [0] * node_count
        self.accepted: List[Set[int]] = [set() for _ in range(node_count)]
        self.pending: List[Dict[int, List[int]]] = [dict() for _ in range(node_count)]
        self.accept_time: List[Dict[int, float]] = [dict() for _ in range(node_count)]
        self._height: Dict[int, int] = {}
        self._parent: Dict[int, int] = {}

    def register_block(self, block_id: int, parent_id: int, height: int) -> None:
        self._height[block_id] = height
        self._parent[block_id] = parent_id

    def has_accepted(self, node: int, block_id: int) -> bool:
        return block_id == GENESIS_ID or block_id in self.accepted[node]

    def try_accept(self, node: int, block_id: int, now: float) -> List[int]:
        """Accept if the parent is in; returns all block ids newly accepted."""
        if block_id in self.accepted[node]:
            return []
        parent = self._parent[block_id]
        if not self.has_accepted(node, parent):
            self.pending[node].setdefault(parent, []).append(block_id)
            return []
        newly = []
        stack = [block_id]
        while stack:
            bid = stack.pop(0)
            if bid in self.accepted[node]:
                continue
            self.accepted[node].add(bid)
            self.accept_time[node][bid] = now
            newly.append(bid)
            h = self._height[bid]
            if h > self.tip_height[node]:
                self.tip_height[node] = h
                self.tip_id[node] = bid
            for child in self.pending[node].pop(bid, []):
                stack.append(child)
        return newly

    def tip(self, node: int) -> Tuple[int, int]:
        return self.tip_id[node], self.tip_height[node]


def classify_stale(descriptors: dict) -> Tuple[Set[int], Set[int], Set[int]]:
    """Split blocks into (canonical, stale, excluded) id sets.

    Excluded blocks are invalid ones plus anything with an invalid ancestor;
    they belong in neither the stale numerator nor denominator. The canonical
    chain is the highest valid chain, ties broken by earliest mine time then
    lowest id.
    """
    valid: Set[int] = set()
    for bid in sorted(descriptors):
        d = descriptors[bid]
        self_ok = d.pow_valid and not d.has_invalid_tx
        parent_ok = d.parent_id == GENESIS_ID or d.parent_id in valid
        if self_ok and parent_ok:
            valid.add(bid)

    excluded = set(descriptors) - valid
    if not valid:
        return set(), set(), excluded

    best: Optional[int] = None
    best_key = None
    for bid in valid:
        d = descriptors[bid]
        key = (-d.height, d.mine_time, d.block_id)
        if best_key is None or key < best_key:
            best_key = key
            best = bid

    canonical: Set[int] = set()
    cur = best
    while cur != GENESIS_ID:
        canonical.add(cur)
        cur = descriptors[cur].parent_id
    stale = valid - canonical
    return canonical, stale, excluded
