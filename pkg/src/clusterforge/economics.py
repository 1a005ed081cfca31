"""Capital and operating costs, power, weight and heat reuse."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .expr import is_number
from .layout import total_cable_length
from .ups import DEFAULT_EFFICIENCY

HOURS_PER_YEAR = 24 * 365
TOMATO_KG_PER_MW_DAY = 400.0


class EconomicsError(Exception):
    pass


@dataclass(frozen=True)
class CostParams:
    lifetime_years: float = 3.0
    electricity_usd_per_kwh: float = 0.35
    rack_fee_usd_per_year: float = 3000.0
    rack_unit_cost_usd: float = 0.0
    cable_usd_per_m: dict = field(default_factory=lambda: {"node_edge": 0.0, "edge_core": 0.0})
    duty_cycle: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            vals = v.values() if isinstance(v, dict) else [v]
            for x in vals:
                if not is_number(x) or x < 0 or not math.isfinite(x):
                    raise EconomicsError(f"cost parameter {f.name} must be a non-negative number, got {x!r}")
        if not self.lifetime_years > 0:
            raise EconomicsError("lifetime_years must be positive")
        if not 0 < self.duty_cycle <= 1:
            raise EconomicsError("duty_cycle must be in (0, 1]")


def _money(x: float) -> float:
    return round(x, 2)


def _node(m, name):
    v = m.get(name, 0.0)
    if not is_number(v):
        raise EconomicsError(f"node metric '{name}' must be numeric")
    return float(v)


def power_draw_kw(node_watts: float, switch_watts: float, efficiency: float = DEFAULT_EFFICIENCY) -> float:
    """Electrical input in kW: IT load divided by UPS efficiency."""
    if not efficiency > 0:
        raise EconomicsError(f"UPS efficiency must be positive, got {efficiency}")
    return (node_watts + switch_watts) / efficiency / 1000.0


def group_it_load_kw(group) -> float:
    return (group.nodes * _node(group.metrics, "node_power") + group.network.totals["power"]) / 1000.0


def group_power_kw(group) -> float:
    eff = group.ups.efficiency if group.ups is not None else DEFAULT_EFFICIENCY
    return power_draw_kw(group.nodes * _node(group.metrics, "node_power"), group.network.totals["power"], eff)


def total_power_kw(design) -> float:
    if not design.groups:
        raise EconomicsError("design has no equipment groups")
    return sum(group_power_kw(g) for g in design.groups)


def total_weight_kg(design) -> float:
    w = 0.0
    for g in design.groups:
        w += g.nodes * _node(g.metrics, "node_weight") + g.network.totals["weight"]
        if g.ups is not None:
            w += g.ups.totals["weight"]
    return w


def opex(power_kw: float, rack_count: int, p: CostParams = CostParams()) -> float:
    """Electricity plus rack stationing over the system lifetime, USD (to the cent)."""
    if power_kw < 0 or rack_count < 0:
        raise EconomicsError("power and rack count must be non-negative")
    energy_kwh = power_kw * HOURS_PER_YEAR * p.lifetime_years * p.duty_cycle
    return _money(energy_kwh * p.electricity_usd_per_kwh + rack_count * p.rack_fee_usd_per_year * p.lifetime_years)


def capex_breakdown(design, p: CostParams = CostParams()) -> dict:
    nodes = network = ups = 0.0
    for g in design.groups:
        nodes += g.nodes * _node(g.metrics, "node_cost")
        network += g.network.totals["cost"]
        if g.ups is not None:
            ups += g.ups.totals["cost"]
    racks = design.placement.rack_count * p.rack_unit_cost_usd if design.placement is not None else 0.0
    cables = 0.0
    for c in design.cables or ():
        cables += c.length_m * p.cable_usd_per_m.get(c.cls, 0.0)
    return {"nodes": nodes, "network": network, "ups": ups, "racks": racks, "cables": cables}


def capex(design, p: CostParams = CostParams()) -> float:
    return _money(sum(capex_breakdown(design, p).values()))


def tomato_equivalent(power_kw: float) -> int:
    """Kilograms of greenhouse tomatoes per day the waste heat could grow."""
    if power_kw < 0:
        raise EconomicsError("power must be non-negative")
    return math.floor(power_kw * TOMATO_KG_PER_MW_DAY / 1000.0)


@dataclass(frozen=True)
class DesignSummary:
    node_model: str
    cpu_model: str
    cpu_frequency_ghz: float
    node_peak_gflops: float
    node_power_w: float
    nodes: int
    racks: int
    floor_area_m2: float
    cable_length_m: float
    power_kw: float
    weight_t: float
    capex_usd: float
    opex_usd: float
    tco_usd: float
    tomato_kg_day: int

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _text(m, name):
    v = m.get(name)
    if isinstance(v, frozenset):
        return ", ".join(sorted(v))
    return "" if v is None else str(v)


def summarize(design, p: CostParams = CostParams()) -> DesignSummary:
    if not design.groups:
        raise EconomicsError("design incomplete: no equipment groups")
    if design.placement is None or design.floor is None:
        raise EconomicsError("design incomplete: equipment not placed")
    if design.cables is None:
        raise EconomicsError("design incomplete: cables not routed")
    first = design.groups[0].metrics
    power = total_power_kw(design)
    cap = capex(design, p)
    op = opex(power, design.placement.rack_count, p)
    return DesignSummary(
        node_model=" / ".join(dict.fromkeys(_text(g.metrics, "node_model") for g in design.groups)),
        cpu_model=" / ".join(dict.fromkeys(_text(g.metrics, "cpu_model") for g in design.groups)),
        cpu_frequency_ghz=_node(first, "cpu_frequency"),
        node_peak_gflops=_node(first, "node_peak_performance"),
        node_power_w=_node(first, "node_power"),
        nodes=sum(g.nodes for g in design.groups),
        racks=design.placement.rack_count,
        floor_area_m2=design.floor.area_m2,
        cable_length_m=total_cable_length(design.cables),
        power_kw=power,
        weight_t=total_weight_kg(design) / 1000.0,
        capex_usd=cap,
        opex_usd=op,
        tco_usd=cap + op,
        tomato_kg_day=tomato_equivalent(power),
    )
