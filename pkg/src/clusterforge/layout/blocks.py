"""Turn designed equipment into placeable devices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..expr import is_number
from .geometry import LayoutError

KINDS = ("core_switch", "edge_switch", "enclosure", "ups_unit")


@dataclass(frozen=True)
class Device:
    id: str
    kind: str
    size_u: int
    group: str = "compute"
    label: str = ""
    metrics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LayoutError(f"unknown device kind {self.kind!r}")
        if not isinstance(self.size_u, int) or self.size_u < 1:
            raise LayoutError(f"device {self.id}: size_u must be a positive integer, got {self.size_u!r}")


@dataclass(frozen=True)
class ComputeBlock:
    index: int
    edge_switch: Device
    enclosures: tuple
    node_count: int
    first_node: int
    enclosure_nodes: tuple  # nodes held by each enclosure

    @property
    def enclosure_u(self) -> int:
        return sum(e.size_u for e in self.enclosures)


def _num(m, name, default=None):
    v = m.get(name, default)
    if v is None:
        return None
    if not is_number(v):
        raise LayoutError(f"node metric '{name}' must be numeric")
    return float(v)


def _switch_device(dev_id, kind, sw, group):
    return Device(dev_id, kind, sw.size_u, group, sw.label,
                  {"cost": sw.cost, "power": sw.power, "weight": sw.weight})


def build_compute_blocks(node_metrics, n_nodes: int, network, group: str = "compute") -> list:
    """Split nodes into blocks of ``k`` (one per edge switch), packed into enclosures.

    ``node_metrics`` may carry ``nodes_per_enclosure`` and ``enclosure_size_u``;
    without them every node is its own enclosure of ``node_size_u`` units.
    """
    m = getattr(node_metrics, "metrics", node_metrics)
    k = network.down_ports
    if n_nodes < 1:
        raise LayoutError("need at least one node")
    if n_nodes > network.edge_count * k:
        raise LayoutError(
            f"{n_nodes} nodes exceed the network capacity of {network.edge_count} x {k} ports")
    per_enc = int(_num(m, "nodes_per_enclosure", 1.0))
    if per_enc < 1:
        raise LayoutError("nodes_per_enclosure must be at least 1")
    enc_u = _num(m, "enclosure_size_u")
    if enc_u is None:
        enc_u = _num(m, "node_size_u")
    if enc_u is None:
        raise LayoutError("node metrics need 'enclosure_size_u' or 'node_size_u' for placement")
    enc_u = int(math.ceil(enc_u))
    node_label = m.get("node_model") if isinstance(m.get("node_model"), str) else "compute node"
    per_node = {key: _num(m, f"node_{key}", 0.0) for key in ("cost", "power", "weight")}

    blocks = []
    enc_id = 0
    for b in range(-(-n_nodes // k)):
        first = b * k
        count = min(k, n_nodes - first)
        sizes = []
        left = count
        while left > 0:
            sizes.append(min(per_enc, left))
            left -= per_enc
        encs = []
        for s in sizes:
            encs.append(Device(f"{group}:enc{enc_id}", "enclosure", enc_u, group, node_label,
                               {key: s * v for key, v in per_node.items()} | {"nodes": s}))
            enc_id += 1
        edge = _switch_device(f"{group}:edge{b}", "edge_switch", network.edge, group)
        blocks.append(ComputeBlock(b, edge, tuple(encs), count, first, tuple(sizes)))
    return blocks


def core_devices(network, group: str = "compute") -> list:
    if network.core is None:
        return []
    return [_switch_device(f"{group}:core{i}", "core_switch", network.core, group)
            for i in range(network.core_count)]


def ups_devices(ups_design, group: str = "compute") -> list:
    if ups_design is None:
        return []
    u = ups_design.unit
    return [Device(f"{group}:ups{i}", "ups_unit", u.size_u, group, u.label,
                   {"cost": u.cost, "power": 0.0, "weight": u.weight})
            for i in range(ups_design.count)]
