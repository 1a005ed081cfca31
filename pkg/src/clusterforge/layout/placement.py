"""Rack placement.

Equipment goes in this order: core switches, compute blocks (edge switch
plus its enclosures), UPS units.  Each kind follows one strategy:

consolidation  first rack with enough room, new rack when none
separation     a fresh rack per item
spread         each item N racks after the previous one (first item in rack 0)

Inside a rack, switches stack down from the top and enclosures / UPS units
stack up from the bottom, so free space always ends up in the middle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import LayoutError

ALIASES = {
    "consolidation": "consolidation", "consolidate": "consolidation", "dense": "consolidation",
    "separation": "separation", "separate": "separation",
    "spread": "spread",
}

DEFAULT_STRATEGIES = {"core_switch": "separation", "block": "consolidation", "ups_unit": "consolidation"}


@dataclass(frozen=True)
class Strategy:
    name: str
    spacing: int = 2

    @classmethod
    def parse(cls, value, spacing=2) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        name = ALIASES.get(str(value).lower())
        if name is None:
            raise LayoutError(f"unknown placement strategy {value!r}")
        if name == "spread" and (int(spacing) != spacing or spacing < 1):
            raise LayoutError(f"spread spacing must be a positive integer, got {spacing!r}")
        return cls(name, int(spacing))


class Rack:
    def __init__(self, index: int, height_u: int = 42):
        self.index = index
        self.height_u = height_u
        self.bottom = 0               # highest slot used by the bottom stack
        self.top = height_u + 1       # lowest slot used by the top stack
        self.occupancy = {}           # start slot -> device id
        self.kinds = set()

    @property
    def free_u(self) -> int:
        return self.top - self.bottom - 1

    @property
    def empty(self) -> bool:
        return not self.occupancy

    @property
    def has_compute(self) -> bool:
        return bool(self.kinds & {"enclosure", "edge_switch"})

    @property
    def ups_only(self) -> bool:
        return self.kinds <= {"ups_unit"}

    def fits(self, size_u: int) -> bool:
        return size_u <= self.free_u

    def push_bottom(self, dev) -> int:
        if not self.fits(dev.size_u):
            raise LayoutError(f"rack {self.index} has no room for {dev.id}")
        start = self.bottom + 1
        self.bottom += dev.size_u
        self.occupancy[start] = dev.id
        self.kinds.add(dev.kind)
        return start

    def push_top(self, dev) -> int:
        if not self.fits(dev.size_u):
            raise LayoutError(f"rack {self.index} has no room for {dev.id}")
        self.top -= dev.size_u
        start = self.top
        self.occupancy[start] = dev.id
        self.kinds.add(dev.kind)
        return start

    def __repr__(self):
        return f"<Rack {self.index} free={self.free_u}U devices={len(self.occupancy)}>"


@dataclass
class Placement:
    height_u: int = 42
    racks: list = field(default_factory=list)
    devices: dict = field(default_factory=dict)    # id -> Device
    location: dict = field(default_factory=dict)   # id -> (rack index, start slot)

    @property
    def rack_count(self) -> int:
        return len(self.racks)

    def rack_of(self, dev_id) -> int:
        return self.location[dev_id][0]

    def slot_of(self, dev_id) -> int:
        return self.location[dev_id][1]

    def slots(self, dev_id) -> range:
        start = self.slot_of(dev_id)
        return range(start, start + self.devices[dev_id].size_u)

    def devices_in(self, rack_index):
        rack = self.racks[rack_index]
        return [self.devices[d] for _, d in sorted(rack.occupancy.items())]

    def new_rack(self) -> Rack:
        r = Rack(len(self.racks), self.height_u)
        self.racks.append(r)
        return r

    def rack(self, index) -> Rack:
        while len(self.racks) <= index:
            self.new_rack()
        return self.racks[index]

    def put(self, dev, rack: Rack, top: bool):
        if dev.id in self.devices:
            raise LayoutError(f"device {dev.id} placed twice")
        start = rack.push_top(dev) if top else rack.push_bottom(dev)
        self.devices[dev.id] = dev
        self.location[dev.id] = (rack.index, start)
        return start


def _first(p, size, eligible, start=0):
    for r in p.racks[start:]:
        if eligible(r) and r.fits(size):
            return r
    return None


def _first_from(p, index, size, eligible):
    """First eligible rack at or after ``index`` with room, creating racks as needed."""
    i = index
    while True:
        r = p.rack(i)
        if eligible(r) and r.fits(size):
            return r
        i += 1


def _nearest(p, home, size, eligible):
    best = None
    for r in p.racks:
        if eligible(r) and r.fits(size):
            key = (abs(r.index - home), r.index)
            if best is None or key < best[0]:
                best = (key, r)
    return None if best is None else best[1]


def _place_items(p, devices, strategy, top, eligible):
    prev = None
    for dev in devices:
        if strategy.name == "separation":
            rack = p.new_rack()
        elif strategy.name == "consolidation":
            rack = _first(p, dev.size_u, eligible) or p.new_rack()
        else:
            target = 0 if prev is None else prev + strategy.spacing
            rack = _first_from(p, target, dev.size_u, eligible)
        p.put(dev, rack, top)
        prev = rack.index


def _not_ups(r):
    return "ups_unit" not in r.kinds


def _place_block(p, block, strategy, prev):
    need = block.enclosure_u
    encs = list(block.enclosures)
    if need <= p.height_u:
        if strategy.name == "separation":
            rack = p.new_rack()
        elif strategy.name == "consolidation":
            rack = _first(p, need, _not_ups) or p.new_rack()
        else:
            target = 0 if prev is None else prev + strategy.spacing
            rack = _first_from(p, target, need, _not_ups)
        for e in encs:
            p.put(e, rack, top=False)
    else:
        # block taller than a rack: enclosures fill racks one after another
        rack = p.new_rack() if strategy.name != "consolidation" else None
        for e in encs:
            if rack is None or not rack.fits(e.size_u):
                if strategy.name == "consolidation":
                    rack = _first(p, e.size_u, _not_ups) or p.new_rack()
                else:
                    rack = p.new_rack()
            p.put(e, rack, top=False)
    home = rack
    sw = block.edge_switch
    if home.fits(sw.size_u):
        target = home
    else:
        target = _nearest(p, home.index, sw.size_u, _not_ups) or p.new_rack()
    p.put(sw, target, top=True)
    return home.index


def place(blocks=(), core_switches=(), ups_units=(), strategies=None, rack_height_u: int = 42) -> Placement:
    """Place devices into racks.

    ``strategies`` maps ``core_switch`` / ``block`` / ``ups_unit`` to a
    strategy name or :class:`Strategy`; missing kinds use the defaults
    (separation for core switches, consolidation otherwise).
    """
    strat = {k: Strategy.parse(v) for k, v in DEFAULT_STRATEGIES.items()}
    for kind, v in (strategies or {}).items():
        if kind not in strat:
            raise LayoutError(f"unknown equipment kind {kind!r} in placement strategies")
        strat[kind] = Strategy.parse(v)
    everything = list(core_switches) + [d for b in blocks for d in (b.edge_switch, *b.enclosures)] + list(ups_units)
    for d in everything:
        if d.size_u > rack_height_u:
            raise LayoutError(f"device {d.id} ({d.size_u}U) is taller than the {rack_height_u}U rack")

    p = Placement(rack_height_u)
    _place_items(p, core_switches, strat["core_switch"], top=True, eligible=lambda r: True)
    prev = None
    for b in blocks:
        prev = _place_block(p, b, strat["block"], prev)
    _place_items(p, ups_units, strat["ups_unit"], top=False, eligible=lambda r: r.ups_only)
    return p
