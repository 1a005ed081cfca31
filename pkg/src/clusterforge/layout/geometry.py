from __future__ import annotations

from dataclasses import dataclass, fields


class LayoutError(Exception):
    pass


@dataclass(frozen=True)
class Geometry:
    """Physical parameters of racks, the room and cable routing (metres)."""
    rack_height_u: int = 42
    rack_width_m: float = 0.6
    rack_depth_m: float = 1.2
    aisle_m: float = 1.2
    side_m: float = 1.0
    u_pitch_m: float = 0.0445
    tray_height_m: float = 2.7
    intra_slack_m: float = 0.5
    inter_slack_factor: float = 1.1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not v > 0:
                raise LayoutError(f"geometry parameter {f.name} must be positive, got {v}")
        if self.rack_height_u != int(self.rack_height_u):
            raise LayoutError("rack_height_u must be a whole number of units")
        object.__setattr__(self, "rack_height_u", int(self.rack_height_u))

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]
