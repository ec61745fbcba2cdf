"""Metric extraction and the CSV contract."""

import json
import math
import os

import numpy as np
import pytest

from blockrelay import metrics
from blockrelay.netsim import Scenario, Simulation
from blockrelay.netsim.sim import RunResult


def tiny_scenario(**kw):
    base = dict(protocol="cbr", node_count=25, block_count=6, seed=21,
                t_b=20.0, block_size_bytes=131_072.0, chunks_k=4,
                outgoing=4, incoming_cap=10)
    base.update(kw)
    return Scenario(**base)


def synthetic_result(reception_rows, mine_times, stale=(), t_b=100.0):
    """Hand-built RunResult with known reception arrays for oracle checks."""
    sc = tiny_scenario(node_count=len(reception_rows[0]),
                       block_count=len(reception_rows), t_b=t_b)

    class _D:
        def __init__(self, i, t):
            self.block_id = i
            self.height = i
            self.miner = 0
            self.mine_time = t

    descriptors = {i: _D(i, mine_times[i]) for i in range(len(reception_rows))}
    reception = {i: np.array(row, dtype=float)
                 for i, row in enumerate(reception_rows)}
    ids = set(range(len(reception_rows)))
    return RunResult(scenario=sc, descriptors=descriptors, reception=reception,
                     canonical=ids - set(stale), stale=set(stale),
                     excluded=set(), bytes_wire=10.0, bytes_payload=8.0,
                     bytes_wasted=1.0, counters={}, accept_time=[],
                     end_time=1.0)


def test_coverage_latency_picks_fractional_order_statistic():
    # 4 nodes: times 1,2,3,4 after a mine at t=10
    res = synthetic_result([[11.0, 12.0, 13.0, 14.0]], [10.0])
    assert metrics.coverage_latency(res, 0, 0.25) == 1.0
    assert metrics.coverage_latency(res, 0, 0.5) == 2.0
    assert metrics.coverage_latency(res, 0, 0.75) == 3.0
    assert metrics.coverage_latency(res, 0, 1.0) == 4.0
    # 0.9 of 4 nodes needs ceil(3.6) = 4 of them
    assert metrics.coverage_latency(res, 0, 0.9) == 4.0


def test_coverage_latency_nan_when_fraction_never_reached():
    res = synthetic_result([[11.0, 12.0, float("nan"), float("nan")]], [10.0])
    assert metrics.coverage_latency(res, 0, 0.5) == 2.0
    assert math.isnan(metrics.coverage_latency(res, 0, 1.0))
    with pytest.raises(ValueError):
        metrics.coverage_latency(res, 0, 0.0)
    with pytest.raises(ValueError):
        metrics.coverage_latency(res, 0, 1.5)


def test_extract_latency_median_and_missed_count():
    rows = [
        [1.0, 2.0, 3.0, 4.0],
        [2.0, 3.0, 4.0, 5.0],
        [1.0, float("nan"), float("nan"), float("nan")],
    ]
    res = synthetic_result(rows, [0.0, 0.0, 0.0])
    rep = metrics.MetricsReport(run_id="x", result=res)
    med, missed = rep.extract_latency(1.0)
    assert missed == 1
    assert med == pytest.approx(np.median([4.0, 5.0]))


def test_mean_reception_latency_pools_all_nodes():
    rows = [
        [10.0, 11.0, 12.0, 13.0],   # mined at 10 -> lat 0,1,2,3
        [20.0, 22.0, 24.0, 26.0],   # mined at 20 -> lat 0,2,4,6
    ]
    res = synthetic_result(rows, [10.0, 20.0])
    want = np.mean([0, 1, 2, 3, 0, 2, 4, 6])
    assert metrics.mean_reception_latency(res) == pytest.approx(want)


def test_mean_reception_latency_skips_excluded_and_nan():
    rows = [
        [10.0, 11.0, float("nan"), 13.0],
        [20.0, 21.0, 22.0, 23.0],
    ]
    res = synthetic_result(rows, [10.0, 20.0])
    res.excluded.add(1)
    res.canonical.discard(1)
    want = np.mean([0.0, 1.0, 3.0])
    assert metrics.mean_reception_latency(res) == pytest.approx(want)


def test_stale_rate_and_model_comparison():
    rows = [[1.0, 2.0]] * 4
    res = synthetic_result(rows, [0.0] * 4, stale=(3,), t_b=100.0)
    rep = metrics.MetricsReport(run_id="x", result=res)
    assert rep.stale_rate == pytest.approx(0.25)
    emp, model = rep.empirical_vs_model()
    assert emp == pytest.approx(0.25)
    assert model == pytest.approx(1.0 - math.exp(-rep.delta))


def test_run_id_encodes_cell_parameters():
    sc = tiny_scenario(protocol="ct", block_size_bytes=25e6, chunks_k=32,
                       coded_m=16, node_count=500, seed=11)
    assert metrics.run_id_for(sc) == "ct_25mb_k32_m16_n500_s11"


def test_matrix_rejects_duplicate_cells():
    sc = tiny_scenario()
    with pytest.raises(metrics.MatrixError, match="duplicate"):
        metrics.run_matrix([sc, sc])


def test_matrix_failure_names_the_cell(tmp_path):
    good = tiny_scenario(node_count=10, block_count=2, outgoing=3,
                         incoming_cap=8)
    # an unconnectable graph: 4 nodes cannot each open 8 outgoing links
    bad = tiny_scenario(node_count=4, seed=99)
    rid = metrics.run_id_for(bad)
    with pytest.raises(metrics.MatrixError, match=rid):
        metrics.run_matrix([good, bad])


def test_bundle_round_trip(tmp_path):
    cells = [tiny_scenario(seed=s, node_count=20, block_count=4,
                           outgoing=3, incoming_cap=8) for s in (1, 2)]
    out = tmp_path / "report"
    reports = metrics.run_matrix(cells, out_dir=str(out))
    assert len(reports) == 2

    schema, rows = metrics.read_csv(str(out / "summary.csv"))
    assert schema == metrics.SUMMARY_SCHEMA
    assert [r["run_id"] for r in rows] == [rep.run_id for rep in reports]
    for row in rows:
        assert set(row) == set(metrics.SUMMARY_COLUMNS)
        assert float(row["L90_s"]) > 0
        assert 0.0 <= float(row["stale_rate"]) <= 1.0
        assert float(row["bytes_total"]) > 0

    schema_b, brows = metrics.read_csv(str(out / "blocks.csv"))
    assert schema_b == metrics.BLOCKS_SCHEMA
    assert len(brows) == 2 * 4
    for row in brows:
        assert row["stale"] in ("0", "1")
        assert float(row["t90_s"]) >= float(row["t50_s"])

    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["kernel_backend"] in ("compiled", "fallback")
    assert [c["run_id"] for c in meta["cells"]] == [r.run_id for r in reports]
    assert all(len(c["config_digest"]) == 16 for c in meta["cells"])


def test_bundle_is_byte_identical_across_writes(tmp_path):
    cells = [tiny_scenario(seed=7, node_count=20, block_count=3,
                           outgoing=3, incoming_cap=8)]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    metrics.run_matrix(cells, out_dir=str(out1))
    metrics.run_matrix(cells, out_dir=str(out2))
    for name in ("blocks.csv", "summary.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_parallel_jobs_match_serial(tmp_path):
    cells = [tiny_scenario(seed=s, node_count=18, block_count=3,
                           outgoing=3, incoming_cap=8) for s in (4, 5, 6)]
    serial, parallel = tmp_path / "ser", tmp_path / "par"
    metrics.run_matrix(cells, out_dir=str(serial), jobs=1)
    metrics.run_matrix(cells, out_dir=str(parallel), jobs=2)
    for name in ("blocks.csv", "summary.csv"):
        assert (serial / name).read_bytes() == (parallel / name).read_bytes()


def test_trace_files_emitted_per_cell(tmp_path):
    cells = [tiny_scenario(seed=3, node_count=12, block_count=2,
                           outgoing=3, incoming_cap=8)]
    out = tmp_path / "tr"
    reports = metrics.run_matrix(cells, out_dir=str(out), trace=True)
    path = out / f"{reports[0].run_id}.trace"
    assert path.exists()
    first = path.read_text().splitlines()[0].split()
    assert len(first) == 6


def test_read_csv_rejects_missing_schema(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="schema"):
        metrics.read_csv(str(p))
