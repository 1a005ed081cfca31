from .blocks import ComputeBlock, Device, build_compute_blocks, core_devices, ups_devices
from .cabling import EDGE_CORE, NODE_EDGE, Cable, Endpoint, cable_length, route_cables, total_cable_length
from .floor import FloorPlan, RackPosition, plan_floor, serpentine
from .geometry import Geometry, LayoutError
from .placement import Placement, Rack, Strategy, place

__all__ = [
    "Cable", "ComputeBlock", "Device", "EDGE_CORE", "Endpoint", "FloorPlan", "Geometry", "LayoutError",
    "NODE_EDGE", "Placement", "Rack", "RackPosition", "Strategy", "build_compute_blocks", "cable_length",
    "core_devices", "place", "plan_floor", "route_cables", "serpentine", "total_cable_length", "ups_devices",
]
