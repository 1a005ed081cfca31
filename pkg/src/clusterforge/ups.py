"""UPS selection: cheapest catalogue unit (times count) covering a load."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import ExprError, eval_formula, is_number, parse_formula
from .graph import ConfigGraph, enumerate_configs

DEFAULT_EFFICIENCY = 0.95


class UpsDesignError(Exception):
    pass


@dataclass(frozen=True)
class UpsConfig:
    label: str
    capacity_kw: float
    runtime_min: float
    cost: float
    power_overhead: float
    size_u: int
    weight: float
    origin_index: int

    @classmethod
    def from_configuration(cls, c) -> "UpsConfig":
        m = c.metrics
        for key in ("capacity_kw", "cost", "size_u", "weight"):
            if not is_number(m.get(key)):
                raise UpsDesignError(f"UPS configuration {c.origin_index} lacks numeric metric '{key}'")
        eff = m.get("power_overhead", DEFAULT_EFFICIENCY)
        runtime = m.get("runtime_min", 0.0)
        if not m["capacity_kw"] > 0:
            raise UpsDesignError(f"UPS configuration {c.origin_index}: capacity_kw must be positive")
        if not is_number(eff) or not 0 < eff <= 1:
            raise UpsDesignError(f"UPS configuration {c.origin_index}: power_overhead must be in (0, 1]")
        label = m.get("ups_model")
        if not isinstance(label, str):
            label = f"UPS #{c.origin_index}"
        return cls(label, float(m["capacity_kw"]), float(runtime), float(m["cost"]), float(eff),
                   int(math.ceil(m["size_u"])), float(m["weight"]), c.origin_index)

    def to_dict(self):
        return {
            "label": self.label, "capacity_kw": self.capacity_kw, "runtime_min": self.runtime_min,
            "cost": self.cost, "power_overhead": self.power_overhead, "size_u": self.size_u,
            "weight": self.weight, "origin_index": self.origin_index,
        }


def ups_catalogue(source) -> list:
    if isinstance(source, ConfigGraph):
        source = enumerate_configs(source)
    return [s if isinstance(s, UpsConfig) else UpsConfig.from_configuration(s) for s in source]


@dataclass(frozen=True)
class UpsDesign:
    load_kw: float
    backup_min: float | None
    unit: UpsConfig
    count: int
    totals: dict
    objective: float

    @property
    def delivered_capacity_kw(self) -> float:
        return self.count * self.unit.capacity_kw

    @property
    def efficiency(self) -> float:
        return self.unit.power_overhead

    def to_dict(self):
        return {
            "load_kw": self.load_kw,
            "backup_min": self.backup_min,
            "unit": self.unit.to_dict(),
            "count": self.count,
            "delivered_capacity_kw": self.delivered_capacity_kw,
            "efficiency": self.efficiency,
            "totals": dict(self.totals),
            "objective": self.objective,
        }


def ups_totals(unit: UpsConfig, count: int) -> dict:
    return {
        "cost": count * unit.cost,
        "size_u": float(count * unit.size_u),
        "weight": count * unit.weight,
        "capacity_kw": count * unit.capacity_kw,
        "units": float(count),
    }


def design_ups(load_kw: float, backup_min=None, catalogue=(), objective="cost") -> UpsDesign:
    """Cover ``load_kw`` with ``ceil(load / capacity)`` identical units.

    Units whose runtime is shorter than ``backup_min`` are skipped.  The
    objective is evaluated over the totals (``cost``, ``size_u``, ``weight``,
    ``capacity_kw``, ``units``); ties prefer fewer units, then catalogue order.
    """
    if not is_number(load_kw) or not load_kw > 0 or not math.isfinite(load_kw):
        raise UpsDesignError(f"load must be a positive number of kW, got {load_kw!r}")
    if backup_min is not None and (not is_number(backup_min) or backup_min < 0):
        raise UpsDesignError(f"backup time must be a non-negative number of minutes, got {backup_min!r}")
    units = ups_catalogue(catalogue)
    obj = parse_formula(objective) if isinstance(objective, str) else objective
    best, best_key = None, None
    for u in units:
        if backup_min is not None and u.runtime_min < backup_min:
            continue
        count = max(1, math.ceil(load_kw / u.capacity_kw))
        while count * u.capacity_kw < load_kw:
            count += 1
        totals = ups_totals(u, count)
        try:
            value = eval_formula(obj, totals)
        except ExprError as exc:
            raise UpsDesignError(f"objective {obj.source!r}: {exc}") from exc
        key = (float(value), count, u.origin_index)
        if best_key is None or key < best_key:
            best_key = key
            best = UpsDesign(float(load_kw), backup_min, u, count, totals, float(value))
    if best is None:
        if not units:
            raise UpsDesignError("UPS catalogue is empty")
        longest = max(u.runtime_min for u in units)
        raise UpsDesignError(f"no UPS offers {backup_min:g} min of backup (longest is {longest:g} min)")
    return best
