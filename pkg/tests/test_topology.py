"""Peer graph generation: connectivity, degree accounting, determinism."""

import pytest

from blockrelay.netsim.topology import (
    Topology,
    generate_topology,
    linear_topology,
    load_region_table,
)


def test_linear_topology_shape():
    topo = linear_topology(5, bandwidth_bps=8e6, delay_s=0.002)
    assert topo.node_count == 5
    assert topo.neighbors[0] == (1,)
    assert topo.neighbors[2] == (1, 3)
    assert topo.neighbors[4] == (3,)
    assert topo.edge_count() == 4
    assert topo.link_delay(1, 2) == 0.002
    assert topo.link_delay(2, 1) == 0.002
    assert topo.is_connected()


def test_linear_topology_rejects_single_node():
    with pytest.raises(ValueError):
        linear_topology(1)


def test_region_table_loads_and_is_symmetric():
    table = load_region_table()
    regions = list(table["regions"])
    assert len(regions) >= 3
    assert abs(sum(r["weight"] for r in table["regions"].values()) - 1.0) < 1e-9
    for a in regions:
        for b in regions:
            assert table["delay_ms"][a][b] == table["delay_ms"][b][a]


def test_generated_graph_connected_and_degree():
    topo = generate_topology(200, seed=4)
    assert topo.is_connected()
    degrees = [len(nb) for nb in topo.neighbors]
    # every node initiates 8 links, so the mean degree is 16
    assert sum(degrees) / len(degrees) == pytest.approx(16.0, abs=0.01)
    assert min(degrees) >= 8


def test_generated_graph_deterministic():
    a = generate_topology(150, seed=9)
    b = generate_topology(150, seed=9)
    assert a.neighbors == b.neighbors
    assert a.upload_bps == b.upload_bps
    assert a.delay == b.delay
    c = generate_topology(150, seed=10)
    assert c.neighbors != a.neighbors


def test_generated_graph_bandwidth_positive_and_asymmetric():
    topo = generate_topology(100, seed=2)
    table = load_region_table()
    ratio = table["download_ratio"]
    for up, down in zip(topo.upload_bps, topo.download_bps):
        assert up > 0
        assert down == pytest.approx(up * ratio)


def test_generated_delays_cover_every_edge():
    topo = generate_topology(80, seed=6)
    for u in range(80):
        for v in topo.neighbors[u]:
            d = topo.link_delay(u, v)
            assert d > 0
            assert d < 0.2


def test_incoming_cap_respected():
    # tight cap: 30 nodes, 4 outgoing, cap 8 incoming
    topo = generate_topology(30, seed=1, outgoing=4, incoming_cap=8)
    assert topo.is_connected()
    degrees = [len(nb) for nb in topo.neighbors]
    assert max(degrees) <= 4 + 8
