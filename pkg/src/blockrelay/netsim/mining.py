"""Pre-generated mining schedules.

The whole schedule is drawn up front from the run seed: i.i.d. exponential
inter-block gaps and weight-sampled miners. Runs that share a seed therefore
see identical (time, miner) pairs regardless of protocol, which is what makes
cross-protocol comparisons paired.
"""

from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple


def mining_schedule(block_interval_s: float, block_count: int, node_count: int,
                    seed: int,
                    miner_weights: Optional[Sequence[float]] = None,
                    ) -> List[Tuple[float, int]]:
    """Return block_count (mine_time, miner) pairs, strictly increasing times."""
    if block_interval_s <= 0:
        raise ValueError("block interval must be positive")
    if block_count < 0:
        raise ValueError("block count must be >= 0")
    # string seeds hash deterministically across processes; tuples do not
    rng = random.Random(f"{seed}|mining")
    if miner_weights is None:
        cum = None
    else:
        if len(miner_weights) != node_count:
            raise ValueError("one weight per node required")
        total = float(sum(miner_weights))
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        cum = []
        acc = 0.0
        for w in miner_weights:
            acc += w / total
            cum.append(acc)

    out = []
    t = 0.0
    for _ in range(block_count):
        t += rng.expovariate(1.0 / block_interval_s)
        if cum is None:
            miner = rng.randrange(node_count)
        else:
            x = rng.random()
            miner = _bisect(cum, x)
        out.append((t, miner))
    return out


def _bisect(cum: List[float], x: float) -> int:
    lo, hi = 0, len(cum) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if x <= cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo
