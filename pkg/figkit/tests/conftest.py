import math
import random

import pytest

SUMMARY_HEADER = ("run_id,protocol,block_mb,k,M,nodes,seed,L50_s,L90_s,"
                  "delta,stale_rate,bytes_total,bytes_wasted")
BLOCKS_HEADER = ("run_id,block_id,height,miner,mine_time_s,t50_s,t90_s,"
                 "t100_s,stale")


def write_summary(path, rows):
    lines = ["# schema: summary/1", SUMMARY_HEADER]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_blocks(path, rows):
    lines = ["# schema: blocks/1", BLOCKS_HEADER]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def bundle(tmp_path):
    """A 16-cell reference bundle: 4 protocols x 4 block sizes, one seed."""
    rng = random.Random(4)
    base = {"sr": 8.0, "cbr": 1.0, "ct": 0.4, "coded": 0.3}
    summary = []
    blocks = []
    for proto in ("sr", "cbr", "ct", "coded"):
        for mb in (1, 25, 50, 100):
            rid = f"{proto}_{mb}mb_k32_m16_n500_s11"
            l90 = base[proto] * mb ** 0.9
            delta = l90 / 600.0
            stale = 1.0 - math.exp(-delta)
            summary.append((rid, proto, mb, 32, 16, 500, 11,
                            f"{l90 * 0.8:.9f}", f"{l90:.9f}",
                            f"{delta:.9g}", f"{stale:.9g}",
                            "123456789", "1024"))
            for b in range(30):
                t90 = l90 * rng.uniform(0.6, 1.6)
                blocks.append((rid, b, b, rng.randrange(500),
                               f"{b * 600.0:.9f}", f"{t90 * 0.8:.9f}",
                               f"{t90:.9f}", f"{t90 * 1.2:.9f}",
                               1 if rng.random() < stale else 0))
    write_summary(tmp_path / "summary.csv", summary)
    write_blocks(tmp_path / "blocks.csv", blocks)
    return tmp_path
