"""Cable routing with Manhattan lengths through overhead trays."""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import Geometry, LayoutError

NODE_EDGE = "node_edge"
EDGE_CORE = "edge_core"


@dataclass(frozen=True)
class Endpoint:
    device: str
    rack: int
    slot: int
    port: int | None = None

    @property
    def label(self) -> str:
        return self.device if self.port is None else f"{self.device}/p{self.port}"


@dataclass(frozen=True)
class Cable:
    id: str
    cls: str
    a: Endpoint
    b: Endpoint
    length_m: float


def cable_length(a: Endpoint, b: Endpoint, floor, geometry: Geometry | None = None) -> float:
    """Metres of cable between two rack slots.

    Same rack: vertical run plus a fixed slack.  Different racks: up to the
    tray, along the tray (Manhattan on the floor grid), down again, times a
    slack factor.
    """
    g = geometry or floor.geometry
    if a.device == b.device:
        raise LayoutError(f"cable from {a.device} to itself")
    za, zb = a.slot * g.u_pitch_m, b.slot * g.u_pitch_m
    for ep, z in ((a, za), (b, zb)):
        if z > g.tray_height_m:
            raise LayoutError(f"endpoint {ep.label} at {z:.3f} m is above the cable tray")
    if a.rack == b.rack:
        return abs(a.slot - b.slot) * g.u_pitch_m + g.intra_slack_m
    pa, pb = floor.positions[a.rack], floor.positions[b.rack]
    run = (g.tray_height_m - za) + (g.tray_height_m - zb) + abs(pa.x - pb.x) + abs(pa.y - pb.y)
    return run * g.inter_slack_factor


def _endpoint(placement, dev_id, port=None):
    if dev_id not in placement.location:
        raise LayoutError(f"device {dev_id} has not been placed")
    rack, slot = placement.location[dev_id]
    return Endpoint(dev_id, rack, slot, port)


def route_cables(placement, floor, network, blocks, cores, start=0, geometry=None) -> list:
    """One cable per node to its block's edge switch, then ``E x u`` uplinks.

    Node ``i`` of a block uses edge port ``i + 1``; uplink ``j`` of an edge
    switch uses port ``k + j + 1`` and lands on the core chosen by the
    round-robin uplink map, taking that core's next free port.
    """
    g = geometry or floor.geometry
    if floor.rack_count < placement.rack_count:
        raise LayoutError("floor plan has fewer racks than the placement")
    cables = []

    def add(cls, a, b):
        cables.append(Cable(f"c{start + len(cables):06d}", cls, a, b, cable_length(a, b, floor, g)))

    for block in blocks:
        port = 0
        for enc, count in zip(block.enclosures, block.enclosure_nodes):
            for bay in range(count):
                port += 1
                add(NODE_EDGE, _endpoint(placement, enc.id, bay + 1),
                    _endpoint(placement, block.edge_switch.id, port))
    if network.core_count:
        if len(cores) != network.core_count or len(blocks) != network.edge_count:
            raise LayoutError("placed switches do not match the network design")
        next_port = [0] * network.core_count
        k = network.down_ports
        for e, j, c in network.uplink_map():
            next_port[c] += 1
            add(EDGE_CORE, _endpoint(placement, blocks[e].edge_switch.id, k + j + 1),
                _endpoint(placement, cores[c].id, next_port[c]))
    return cables


def total_cable_length(cables) -> float:
    return sum(c.length_m for c in cables)
