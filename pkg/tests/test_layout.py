import random

import pytest
from hypothesis import given, settings, strategies as st

from clusterforge.layout import (
    EDGE_CORE, NODE_EDGE, ComputeBlock, Device, Endpoint, Geometry, LayoutError, build_compute_blocks,
    cable_length, core_devices, place, plan_floor, route_cables, serpentine, total_cable_length, ups_devices,
)
from clusterforge.network import SwitchConfig, design_fattree
from clusterforge.ups import UpsConfig, design_ups

BLADE = {"nodes_per_enclosure": 16.0, "enclosure_size_u": 10.0, "node_cost": 100.0, "node_power": 651.0,
         "node_weight": 12.0, "node_model": "blade"}


def switch(ports, size_u=1, idx=0):
    return SwitchConfig(f"sw{ports}", ports, 1000.0, 200.0, size_u, 8.0, frozenset({"InfiniBand"}), None, idx)


def test_blocks_224_nodes_k32():
    net = design_fattree(224, [switch(64)])
    assert net.down_ports == 32 and net.edge_count == 7
    blocks = build_compute_blocks(BLADE, 224, net)
    assert len(blocks) == 7
    assert all(len(b.enclosures) == 2 and b.node_count == 32 for b in blocks)
    assert all(e.size_u == 10 for b in blocks for e in b.enclosures)


def test_blocks_small_cases():
    one = build_compute_blocks({"node_size_u": 1.0}, 1, design_fattree(1, [switch(4)]))
    assert len(one) == 1 and len(one[0].enclosures) == 1
    net = design_fattree(5, [switch(4)])
    assert net.down_ports == 2
    assert [b.node_count for b in build_compute_blocks({"node_size_u": 1.0}, 5, net)] == [2, 2, 1]


def test_blocks_errors():
    net = design_fattree(4, [switch(4)])
    with pytest.raises(LayoutError):
        build_compute_blocks({"node_size_u": 1.0}, 5, net)
    with pytest.raises(LayoutError):
        build_compute_blocks({}, 4, net)


def _enc(i, u=10):
    return Device(f"g:enc{i}", "enclosure", u)


def test_tall_block_consolidates_into_two_racks():
    block = ComputeBlock(0, Device("g:edge0", "edge_switch", 1), tuple(_enc(i) for i in range(5)), 5, 0, (1,) * 5)
    p = place([block])
    assert p.rack_count == 2
    assert [p.rack_of(f"g:enc{i}") for i in range(5)] == [0, 0, 0, 0, 1]


def test_core_separation_and_ups_spread():
    cores = [Device(f"g:core{i}", "core_switch", 1) for i in range(3)]
    p = place(core_switches=cores)
    assert [p.rack_of(c.id) for c in cores] == [0, 1, 2]
    ups = [Device(f"g:ups{i}", "ups_unit", 6) for i in range(3)]
    p = place(ups_units=ups, strategies={"ups_unit": "spread"})
    assert [p.rack_of(u.id) for u in ups] == [0, 2, 4]


def test_stacks_leave_gap_in_middle():
    block = ComputeBlock(0, Device("g:edge0", "edge_switch", 1), (_enc(0), _enc(1)), 32, 0, (16, 16))
    p = place([block])
    assert p.slot_of("g:enc0") == 1 and p.slot_of("g:enc1") == 11
    assert p.slot_of("g:edge0") == 42


def test_edge_switch_overflows_to_nearest_rack():
    blocks = [ComputeBlock(i, Device(f"g:edge{i}", "edge_switch", 2), (Device(f"g:enc{i}", "enclosure", 41),),
                           1, i, (1,)) for i in range(2)]
    p = place(blocks)
    assert p.rack_of("g:enc0") == 0 and p.rack_of("g:edge0") == 1


def test_ups_never_shares_with_compute():
    block = ComputeBlock(0, Device("g:edge0", "edge_switch", 1), (_enc(0),), 16, 0, (16,))
    p = place([block], ups_units=[Device("g:ups0", "ups_unit", 6)])
    assert p.rack_of("g:ups0") != p.rack_of("g:enc0")


def test_device_taller_than_rack():
    with pytest.raises(LayoutError):
        place(core_switches=[Device("g:core0", "core_switch", 43)])
    with pytest.raises(LayoutError):
        place(strategies={"core_switch": "scatter"})


# floor plan

def test_floor_examples():
    f1 = plan_floor(1)
    assert (f1.rows, f1.racks_per_row) == (1, 1)
    f8 = plan_floor(8)
    assert (f8.racks_per_row, f8.rows) == (6, 2)
    assert f8.width_m == pytest.approx(5.6) and f8.depth_m == pytest.approx(6.0)
    assert f8.area_m2 == pytest.approx(33.6)
    f72 = plan_floor(72)
    assert (f72.racks_per_row, f72.rows) == (17, 5)


def test_floor_errors():
    with pytest.raises(LayoutError):
        plan_floor(0)
    with pytest.raises(LayoutError):
        Geometry(aisle_m=0)


@given(st.integers(1, 1000))
def test_serpentine_adjacency(r):
    f = plan_floor(r)
    cells = {(p.row, p.column) for p in f.positions}
    assert len(cells) == r
    for a, b in zip(f.positions, f.positions[1:]):
        assert abs(a.row - b.row) + abs(a.column - b.column) == 1
    assert serpentine(0, f.racks_per_row) == (0, 0)


# cables

def test_cable_length_examples():
    f = plan_floor(2)
    assert cable_length(Endpoint("a", 0, 10), Endpoint("b", 0, 20), f) == pytest.approx(0.945)
    assert cable_length(Endpoint("a", 0, 40), Endpoint("b", 1, 40), f) == pytest.approx(2.684)
    with pytest.raises(LayoutError):
        cable_length(Endpoint("a", 0, 1), Endpoint("a", 0, 1), f)
    with pytest.raises(LayoutError):
        cable_length(Endpoint("a", 0, 61), Endpoint("b", 0, 1), f, Geometry(rack_height_u=70))
    assert total_cable_length([]) == 0


def _oracle_length(c, placement, floor, g=Geometry()):
    ra, sa = placement.location[c.a.device]
    rb, sb = placement.location[c.b.device]
    if ra == rb:
        return abs(sa - sb) * g.u_pitch_m + g.intra_slack_m
    pa, pb = floor.positions[ra], floor.positions[rb]
    za, zb = sa * g.u_pitch_m, sb * g.u_pitch_m
    return ((g.tray_height_m - za) + (g.tray_height_m - zb) + abs(pa.x - pb.x) + abs(pa.y - pb.y)) * g.inter_slack_factor


def _design(n, edge, core=None, ups_load=None):
    net = design_fattree(n, [edge], core_catalogue=[edge] if core is None else [core])
    blocks = build_compute_blocks(BLADE, n, net)
    cores = core_devices(net)
    ups = []
    if ups_load:
        ups = ups_devices(design_ups(ups_load, catalogue=[UpsConfig("u", 40, 8, 1, 0.95, 9, 80, 0)]))
    p = place(blocks, cores, ups)
    f = plan_floor(p.rack_count)
    return net, blocks, cores, p, f


@pytest.mark.parametrize("n, ports, core_ports", [(4, 32, None), (224, 32, None), (100, 16, None),
                                                  (2233, 32, 648), (17, 8, None)])
def test_cable_counts_and_lengths(n, ports, core_ports):
    core = None if core_ports is None else switch(core_ports, size_u=29, idx=1)
    net, blocks, cores, p, f = _design(n, switch(ports), core, ups_load=50)
    cables = route_cables(p, f, net, blocks, cores)
    assert sum(c.cls == NODE_EDGE for c in cables) == n
    assert sum(c.cls == EDGE_CORE for c in cables) == net.edge_count * net.uplinks
    assert len({c.id for c in cables}) == len(cables)
    for c in cables:
        assert c.length_m > 0
        assert c.length_m == pytest.approx(_oracle_length(c, p, f), abs=1e-9)
        assert cable_length(c.b, c.a, f) == c.length_m
    assert total_cable_length(cables) == pytest.approx(sum(_oracle_length(c, p, f) for c in cables), abs=1e-6)


# randomized placement suite

def _random_suite(rnd):
    budget = rnd.randint(1, 194)  # a block adds at most 6 devices, keeping the suite at <= 200
    blocks, cores, ups = [], [], []
    count = 0
    while count < budget:
        kind = rnd.random()
        if kind < 0.15:
            cores.append(Device(f"g:core{len(cores)}", "core_switch", rnd.randint(1, 8)))
            count += 1
        elif kind < 0.3:
            ups.append(Device(f"g:ups{len(ups)}", "ups_unit", rnd.randint(2, 12)))
            count += 1
        else:
            b = len(blocks)
            encs = tuple(Device(f"g:enc{b}_{j}", "enclosure", rnd.randint(1, 14)) for j in range(rnd.randint(1, 5)))
            blocks.append(ComputeBlock(b, Device(f"g:edge{b}", "edge_switch", rnd.randint(1, 2)), encs,
                                       len(encs), 0, (1,) * len(encs)))
            count += 1 + len(encs)
    return blocks, cores, ups


def check_placement(p, blocks, cores, ups):
    expected = {d.id for d in cores} | {d.id for d in ups}
    expected |= {d.id for b in blocks for d in (b.edge_switch, *b.enclosures)}
    assert set(p.location) == expected
    for r in range(p.rack_count):
        used = set()
        enc_top, sw_bottom = 0, p.height_u + 1
        for d in p.devices_in(r):
            slots = set(p.slots(d.id))
            assert min(slots) >= 1 and max(slots) <= p.height_u
            assert not used & slots
            used |= slots
            if d.kind == "enclosure":
                enc_top = max(enc_top, max(slots))
            if d.kind == "edge_switch":
                sw_bottom = min(sw_bottom, min(slots))
        assert enc_top < sw_bottom
        kinds = {d.kind for d in p.devices_in(r)}
        if "ups_unit" in kinds:
            assert kinds == {"ups_unit"}


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["consolidation", "separation", "spread"]))
def test_random_placements(seed, strategy):
    blocks, cores, ups = _random_suite(random.Random(seed))
    p = place(blocks, cores, ups, {"core_switch": strategy, "block": strategy, "ups_unit": strategy})
    check_placement(p, blocks, cores, ups)
    everything = dict.fromkeys(["core_switch", "block", "ups_unit"])
    dense = place(blocks, cores, ups, {k: "consolidation" for k in everything})
    sparse = place(blocks, cores, ups, {k: "separation" for k in everything})
    assert dense.rack_count <= sparse.rack_count
