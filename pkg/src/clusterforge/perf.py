"""Direct and inverse performance models.

A direct model maps (node metrics, node count) to machine performance.  The
inverse solver finds the smallest node count whose direct performance meets
a target: probe 1, 2, 4, ... until the target is reached, then bisect the
last doubling interval on integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .expr import is_number

MAX_NODES = 2 ** 30

DEFAULT_GAMMA = {"InfiniBand": 0.95, "10GbE": 0.85}


class PerfModelError(Exception):
    pass


class TargetUnreachable(PerfModelError):
    def __init__(self, target, last_nodes, last_performance):
        super().__init__(
            f"target unreachable: {target:g} exceeds {last_performance:g} "
            f"delivered by {last_nodes} nodes (search cap {MAX_NODES})")
        self.target = target
        self.last_nodes = last_nodes
        self.last_performance = last_performance


@dataclass(frozen=True)
class PerfModelSpec:
    """``peak``: nodes x node_peak_performance.

    ``analytic``: r0 * (cpu_frequency / f0) * (nodes * cores_per_node) ** gamma,
    where gamma depends on the node's interconnect technology.  This is a
    stand-in application model; only its shape (monotone, network-sensitive)
    matters.
    """
    kind: str = "peak"
    r0: float = 1.0
    f0: float = 2.0
    gamma: dict = field(default_factory=lambda: dict(DEFAULT_GAMMA))

    def __post_init__(self):
        if self.kind not in ("peak", "analytic"):
            raise PerfModelError(f"unknown performance model {self.kind!r} (expected 'peak' or 'analytic')")
        if self.kind == "analytic":
            if not self.r0 > 0 or not self.f0 > 0:
                raise PerfModelError("analytic model needs r0 > 0 and f0 > 0")
            for tech, g in self.gamma.items():
                if not 0 < g <= 1:
                    raise PerfModelError(f"gamma for {tech} must be in (0, 1], got {g}")


def _metric(m, name):
    v = m.get(name)
    if v is None:
        raise PerfModelError(f"performance model needs metric '{name}'")
    if not is_number(v):
        raise PerfModelError(f"metric '{name}' must be numeric")
    return float(v)


def _gamma(m, spec):
    tech = m.get("network_tech")
    if tech is None:
        raise PerfModelError("analytic model needs metric 'network_tech'")
    techs = [tech] if isinstance(tech, str) else sorted(tech)
    known = [spec.gamma[t] for t in techs if t in spec.gamma]
    if not known:
        raise PerfModelError(f"no gamma configured for network technology {', '.join(techs)}")
    # several adapters: the best interconnect wins
    return max(known)


def direct_performance(metrics, nodes: int, spec: PerfModelSpec = PerfModelSpec()) -> float:
    if nodes < 1:
        raise PerfModelError(f"node count must be >= 1, got {nodes}")
    if spec.kind == "peak":
        return nodes * _metric(metrics, "node_peak_performance")
    freq = _metric(metrics, "cpu_frequency")
    cores = _metric(metrics, "cores_per_node")
    return spec.r0 * (freq / spec.f0) * (nodes * cores) ** _gamma(metrics, spec)


@dataclass
class InverseRun:
    target: float
    nodes: int = 0
    probes: list = field(default_factory=list)  # (nodes, performance) in call order

    @property
    def calls(self) -> int:
        return len(self.probes)


def solve_inverse(target: float, metrics, spec: PerfModelSpec = PerfModelSpec(), model=None) -> InverseRun:
    """Doubling then integer bisection; returns the full probe trace.

    ``model`` overrides the direct model (any callable ``nodes -> performance``
    that is increasing in nodes).
    """
    if not target > 0:
        raise PerfModelError(f"performance target must be positive, got {target}")
    if model is None:
        def model(n):
            return direct_performance(metrics, n, spec)
    run = InverseRun(target)

    def probe(n):
        p = model(n)
        run.probes.append((n, p))
        return p >= target

    hi = 1
    while not probe(hi):
        if hi >= MAX_NODES:
            raise TargetUnreachable(target, hi, run.probes[-1][1])
        hi *= 2
    lo = hi // 2   # fails (or 0 when hi == 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid
    run.nodes = hi
    return run


def inverse_performance(target: float, metrics, spec: PerfModelSpec = PerfModelSpec()) -> int:
    """Smallest node count whose direct performance reaches ``target``."""
    return solve_inverse(target, metrics, spec).nodes


def count_model_calls(run: InverseRun) -> int:
    return run.calls
