"""Fat-tree interconnect design from a switch catalogue.

Two shapes are considered:

* one switch with more than ``n`` ports (single level; one port stays free
  for the uplink out of the cluster);
* a non-blocking two-level folded Clos: every edge switch uses half its
  ports (``k = ports // 2``) for nodes and the other half as uplinks,
  ``E = ceil(n / k)`` edge switches, ``C = ceil(E * k / core_ports)`` core
  switches.  The pair is admissible when each core can reach every edge
  switch (``core_ports >= E``) and each edge switch has an uplink to every
  core (``C <= k``).

Every admissible (edge, core) pair and every large-enough single switch is
evaluated and the one with the smallest objective wins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import ExprError, Formula, eval_formula, is_number, parse_formula
from .graph import ConfigGraph, enumerate_configs

SWITCH_METRICS = ("ports", "cost", "power", "size_u", "weight")
TOTAL_KEYS = ("cost", "power", "weight", "size_u")


class NetworkDesignError(Exception):
    pass


class NoFeasibleNetwork(NetworkDesignError):
    def __init__(self, n_nodes, largest):
        super().__init__(
            f"no feasible fat-tree for {n_nodes} nodes: the catalogue supports at most {largest} nodes")
        self.n_nodes = n_nodes
        self.largest = largest


@dataclass(frozen=True)
class SwitchConfig:
    label: str
    ports: int
    cost: float
    power: float
    size_u: int
    weight: float
    technology: frozenset
    vendor: str | None
    origin_index: int

    @classmethod
    def from_configuration(cls, c) -> "SwitchConfig":
        m = c.metrics
        for key in SWITCH_METRICS:
            if not is_number(m.get(key)):
                raise NetworkDesignError(f"switch configuration {c.origin_index} lacks numeric metric '{key}'")
        tech = m.get("technology", frozenset())
        if isinstance(tech, str):
            tech = frozenset([tech])
        ports, size_u = int(m["ports"]), int(math.ceil(m["size_u"]))
        if ports < 2 or size_u < 1:
            raise NetworkDesignError(f"switch configuration {c.origin_index} needs ports >= 2 and size_u >= 1")
        label = m.get("switch_model")
        if not isinstance(label, str):
            label = f"switch #{c.origin_index}"
        vendor = m.get("vendor") if isinstance(m.get("vendor"), str) else None
        return cls(label, ports, float(m["cost"]), float(m["power"]), size_u,
                   float(m["weight"]), tech, vendor, c.origin_index)

    def to_dict(self):
        return {
            "label": self.label, "ports": self.ports, "cost": self.cost, "power": self.power,
            "size_u": self.size_u, "weight": self.weight, "technology": sorted(self.technology),
            "vendor": self.vendor, "origin_index": self.origin_index,
        }


def switch_catalogue(source) -> list:
    """Accept a ConfigGraph, a list of Configurations or of SwitchConfigs."""
    if isinstance(source, ConfigGraph):
        source = enumerate_configs(source)
    out = []
    for s in source:
        out.append(s if isinstance(s, SwitchConfig) else SwitchConfig.from_configuration(s))
    return out


@dataclass(frozen=True)
class NetworkDesign:
    n_nodes: int
    levels: int
    edge: SwitchConfig
    edge_count: int
    down_ports: int
    uplinks: int
    core: SwitchConfig | None
    core_count: int
    totals: dict
    objective: float

    @property
    def node_cables(self) -> int:
        return self.n_nodes

    @property
    def core_cables(self) -> int:
        return self.edge_count * self.uplinks

    @property
    def switch_count(self) -> int:
        return self.edge_count + self.core_count

    def uplink_map(self):
        """(edge index, uplink index, core index) for every edge-to-core cable.

        Uplinks are dealt round-robin over the core switches, so core loads
        differ by at most one port.
        """
        return [(e, j, (e * self.uplinks + j) % self.core_count)
                for e in range(self.edge_count) for j in range(self.uplinks)]

    def to_dict(self):
        return {
            "nodes": self.n_nodes,
            "levels": self.levels,
            "edge": dict(self.edge.to_dict(), count=self.edge_count,
                         down_ports=self.down_ports, uplinks=self.uplinks),
            "core": None if self.core is None else dict(self.core.to_dict(), count=self.core_count),
            "cables": {"node_edge": self.node_cables, "edge_core": self.core_cables},
            "totals": dict(self.totals),
            "objective": self.objective,
        }


def network_totals(d: NetworkDesign) -> dict:
    """Summed cost/power/weight/size_u over all switches plus the switch count."""
    return _totals(d.edge, d.edge_count, d.core, d.core_count)


def _totals(edge, e_count, core, c_count):
    out = {}
    for key in TOTAL_KEYS:
        v = e_count * getattr(edge, key)
        if core is not None:
            v += c_count * getattr(core, key)
        out[key] = float(v)
    out["switches"] = float(e_count + c_count)
    return out


def two_level_shape(n_nodes, edge_ports, core_ports):
    """(k, E, u, C) for the two-level rule, or None if inadmissible."""
    k = edge_ports // 2
    if k < 1:
        return None
    e = -(-n_nodes // k)
    u = k
    c = -(-(e * u) // core_ports)
    if core_ports < e or c > k:
        return None
    return k, e, u, c


def _largest_supported(edges, cores):
    best = max((s.ports - 1 for s in edges), default=0)
    for e in edges:
        k = e.ports // 2
        for c in cores:
            if k >= 1:
                # E <= core_ports always keeps C = ceil(E*k/ports_c) <= k
                best = max(best, c.ports * k)
    return best


def _objective_value(obj, totals):
    try:
        v = eval_formula(obj, totals)
    except ExprError as exc:
        raise NetworkDesignError(f"objective {obj.source!r}: {exc}") from exc
    if not is_number(v):
        raise NetworkDesignError(f"objective {obj.source!r} is not numeric")
    return float(v)


def candidate_designs(n_nodes, edges, cores=None, objective="cost"):
    """Every admissible design, in catalogue order (single switches first)."""
    cores = edges if cores is None else cores
    obj = parse_formula(objective) if isinstance(objective, str) else objective
    out = []
    for s in edges:
        if s.ports > n_nodes:
            t = _totals(s, 1, None, 0)
            out.append(NetworkDesign(n_nodes, 1, s, 1, s.ports, 0, None, 0, t, _objective_value(obj, t)))
    for e in edges:
        for c in cores:
            shape = two_level_shape(n_nodes, e.ports, c.ports)
            if shape is None:
                continue
            k, ne, u, nc = shape
            t = _totals(e, ne, c, nc)
            out.append(NetworkDesign(n_nodes, 2, e, ne, k, u, c, nc, t, _objective_value(obj, t)))
    return out


def _rank(d: NetworkDesign):
    core_idx = -1 if d.core is None else d.core.origin_index
    return (d.objective, d.switch_count, d.edge.origin_index, core_idx, d.levels)


def design_fattree(n_nodes: int, catalogue, objective: Formula | str = "cost", core_catalogue=None) -> NetworkDesign:
    """Minimum-objective fat-tree for ``n_nodes``.

    ``catalogue`` supplies edge (and single-level) switches; cores come from
    ``core_catalogue`` when given, else from the same catalogue.  Ties are
    broken by fewer switches, then the lower catalogue index of the edge
    switch.
    """
    if not isinstance(n_nodes, int) or isinstance(n_nodes, bool) or n_nodes < 1:
        raise NetworkDesignError(f"number of nodes must be a positive integer, got {n_nodes!r}")
    edges = switch_catalogue(catalogue)
    cores = edges if core_catalogue is None else switch_catalogue(core_catalogue)
    if not edges:
        raise NetworkDesignError("switch catalogue is empty")
    designs = candidate_designs(n_nodes, edges, cores, objective)
    if not designs:
        raise NoFeasibleNetwork(n_nodes, _largest_supported(edges, cores))
    return min(designs, key=_rank)
