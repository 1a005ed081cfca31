"""Machine-room floor plan with serpentine rack order."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..expr import round_half_away
from .geometry import Geometry, LayoutError


@dataclass(frozen=True)
class RackPosition:
    index: int
    row: int
    column: int
    x: float
    y: float


@dataclass(frozen=True)
class FloorPlan:
    rows: int
    racks_per_row: int
    positions: tuple
    width_m: float
    depth_m: float
    geometry: Geometry

    @property
    def area_m2(self) -> float:
        return self.width_m * self.depth_m

    @property
    def rack_count(self) -> int:
        return len(self.positions)

    def racks_in_row(self, row):
        return sorted((p for p in self.positions if p.row == row), key=lambda p: p.column)


def serpentine(index: int, racks_per_row: int):
    """(row, column) of the ``index``-th rack: even rows run left to right, odd rows back."""
    row, pos = divmod(index, racks_per_row)
    col = pos if row % 2 == 0 else racks_per_row - 1 - pos
    return row, col


def plan_floor(rack_count: int, geometry: Geometry = Geometry()) -> FloorPlan:
    """Choose rows x racks-per-row for a roughly square room and place racks.

    Racks per row is ``sqrt(R * (rack_depth + aisle) / rack_width)`` rounded,
    which makes the row length match the depth taken up by the rows.
    """
    if rack_count < 1:
        raise LayoutError("floor plan needs at least one rack")
    g = geometry
    per_row = int(round_half_away(math.sqrt(rack_count * (g.rack_depth_m + g.aisle_m) / g.rack_width_m)))
    per_row = min(max(per_row, 1), rack_count)
    rows = -(-rack_count // per_row)
    positions = []
    for i in range(rack_count):
        row, col = serpentine(i, per_row)
        x = g.side_m + (col + 0.5) * g.rack_width_m
        y = g.aisle_m + row * (g.rack_depth_m + g.aisle_m) + g.rack_depth_m / 2
        positions.append(RackPosition(i, row, col, x, y))
    width = per_row * g.rack_width_m + 2 * g.side_m
    depth = rows * g.rack_depth_m + (rows + 1) * g.aisle_m
    return FloorPlan(rows, per_row, tuple(positions), width, depth, g)
