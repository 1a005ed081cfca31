"""The evolving design: equipment groups plus layout results."""
from __future__ import annotations

from dataclasses import dataclass, field

from .layout import Geometry


@dataclass
class Group:
    """One homogeneous set of compute nodes with its network and UPS."""
    name: str
    config: object          # graph.Configuration of the compute node
    nodes: int
    network: object         # network.NetworkDesign
    ups: object = None      # ups.UpsDesign or None
    blocks: list = field(default_factory=list)
    cores: list = field(default_factory=list)
    ups_units: list = field(default_factory=list)

    @property
    def metrics(self):
        return self.config.metrics


@dataclass
class Design:
    groups: list = field(default_factory=list)
    geometry: Geometry = field(default_factory=Geometry)
    placement: object = None
    floor: object = None
    cables: list | None = None

    def group(self, name):
        for g in self.groups:
            if g.name == name:
                return g
        raise KeyError(name)

    def add_group(self, group: Group):
        if any(g.name == group.name for g in self.groups):
            raise ValueError(f"group '{group.name}' already exists")
        self.groups.append(group)
        # new equipment invalidates earlier layout
        self.placement = self.floor = self.cables = None
