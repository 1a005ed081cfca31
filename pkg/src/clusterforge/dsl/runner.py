"""Execute design scripts against one evolving design state."""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, fields

from .. import data_path
from ..design import Design, Group
from ..economics import CostParams, EconomicsError, summarize
from ..expr import ExprError, is_number
from ..graph import DatabaseError, load_configs
from ..layout import (Geometry, LayoutError, Strategy, build_compute_blocks, core_devices, place,
                      plan_floor, route_cables, ups_devices)
from ..network import NetworkDesignError, design_fattree, switch_catalogue
from ..perf import DEFAULT_GAMMA, PerfModelError, PerfModelSpec, direct_performance, solve_inverse
from ..pool import (CandidatePool, PoolError, apply_constraint, define_metric, delete, rank_and_trim,
                    select_best, set_metric, update_metrics)
from ..ups import UpsDesignError, design_ups
from .script import Script, ScriptError, parse_script, tokenize, _Parser
from .svg import draw_rows
from .writers import WriterError, format_cable_table, write_summary

log = logging.getLogger(__name__)


class RunError(Exception):
    pass


DOMAIN_ERRORS = (RunError, ExprError, PoolError, PerfModelError, NetworkDesignError, UpsDesignError,
                 LayoutError, EconomicsError, DatabaseError, WriterError, OSError)


def packaged_db(name: str) -> str:
    return data_path("db", name)


def default_options() -> dict:
    opts = {
        "performance.model": "analytic",
        "performance.r0": 1.0,
        "performance.f0": 2.0,
        "layout.spread": 2,
        "network.catalog": [packaged_db("switches.xml")],
        "ups.catalog": [packaged_db("ups.xml")],
    }
    for tech, g in DEFAULT_GAMMA.items():
        opts[f"performance.gamma.{tech}"] = g
    for f in fields(Geometry):
        opts[f"layout.{f.name}"] = f.default
    base = CostParams()
    for f in fields(CostParams):
        if f.name == "cable_usd_per_m":
            for cls, v in base.cable_usd_per_m.items():
                opts[f"econ.cable_usd_per_m.{cls}"] = v
        else:
            opts[f"econ.{f.name}"] = getattr(base, f.name)
    return opts


def check_option(key: str, value):
    """Validate one option; returns the normalised value."""
    if not isinstance(key, str):
        raise RunError(f"option name must be a string, got {key!r}")
    if key == "performance.model":
        if value not in ("peak", "analytic"):
            raise RunError(f"performance.model must be 'peak' or 'analytic', got {value!r}")
        return value
    if key in ("network.catalog", "ups.catalog"):
        files = [value] if isinstance(value, str) else value
        if not isinstance(files, list) or not files or not all(isinstance(f, str) for f in files):
            raise RunError(f"{key} must be a file name or a non-empty list of file names")
        return list(files)
    numeric = (key in ("performance.r0", "performance.f0", "layout.spread")
               or key.startswith("performance.gamma.") and len(key) > len("performance.gamma.")
               or key.startswith("layout.") and key[7:] in Geometry.names()
               or key.startswith("econ.cable_usd_per_m.") and len(key) > len("econ.cable_usd_per_m.")
               or key.startswith("econ.") and key[5:] in {f.name for f in fields(CostParams)} - {"cable_usd_per_m"})
    if not numeric:
        raise RunError(f"unknown option '{key}'")
    if not is_number(value) or not math.isfinite(value):
        raise RunError(f"option '{key}' needs a number, got {value!r}")
    return value


def parse_option_value(text: str):
    """Command-line option values use script literal syntax; bare words stay text."""
    try:
        p = _Parser(tokenize(text))
        v = p.literal()
        if p.tok.kind == "eof":
            return v
    except ScriptError:
        pass
    return text


@dataclass
class DesignState:
    options: dict = field(default_factory=default_options)
    pool: CandidatePool | None = None
    network: object = None        # pending NetworkDesign for the next group
    ups: object = None            # pending UpsDesign for the next group
    performance: float | None = None
    design: Design = field(default_factory=Design)

    def opt_group(self, prefix):
        n = len(prefix)
        return {k[n:]: v for k, v in self.options.items() if k.startswith(prefix)}

    @property
    def perf_spec(self) -> PerfModelSpec:
        o = self.options
        return PerfModelSpec(o["performance.model"], float(o["performance.r0"]), float(o["performance.f0"]),
                             {t: float(g) for t, g in self.opt_group("performance.gamma.").items()})

    @property
    def geometry(self) -> Geometry:
        g = self.opt_group("layout.")
        return Geometry(**{k: g[k] for k in Geometry.names()})

    @property
    def cost_params(self) -> CostParams:
        e = self.opt_group("econ.")
        cable = {k[len("cable_usd_per_m."):]: float(v) for k, v in e.items() if k.startswith("cable_usd_per_m.")}
        plain = {k: float(v) for k, v in e.items() if not k.startswith("cable_usd_per_m.")}
        return CostParams(cable_usd_per_m=cable, **plain)


@dataclass
class RunReport:
    executed: int = 0
    warnings: list = field(default_factory=list)
    outputs: list = field(default_factory=list)       # paths written
    documents: dict = field(default_factory=dict)     # output name -> text
    summary: object = None
    error: str | None = None
    error_line: int | None = None
    stdout: str = ""
    state: DesignState | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class _Runner:
    def __init__(self, options, base_dir, out_dir, report):
        self.state = DesignState()
        for k, v in (options or {}).items():
            self.state.options[k] = check_option(k, v)
        self.base_dir = base_dir
        self.out_dir = out_dir
        self.report = report
        self._seen_warnings = 0

    # helpers

    def path(self, name):
        return name if os.path.isabs(name) else os.path.join(self.base_dir, name)

    def pool(self) -> CandidatePool:
        if self.state.pool is None:
            raise RunError("no configurations: call open_db() first")
        return self.state.pool

    def set_pool(self, pool):
        self.state.pool = pool
        new = pool.warnings[self._seen_warnings:]
        self.report.warnings.extend(new)
        self._seen_warnings = len(pool.warnings)

    def single(self):
        pool = self.pool()
        if len(pool) != 1:
            raise RunError(f"expected exactly one configuration in the pool, found {len(pool)}; "
                           "narrow it with select_best() and delete()")
        return pool.configurations[0]

    def node_count(self, config):
        v = config.metrics.get("nodes")
        if v is None:
            raise RunError("metric 'nodes' is not set: use performance(target=...) or metric('nodes = ...')")
        if not is_number(v) or v != int(v) or v < 1:
            raise RunError(f"metric 'nodes' must be a positive whole number, got {v!r}")
        return int(v)

    def emit(self, name, text):
        self.report.documents[name] = text
        if self.out_dir is not None:
            p = os.path.join(self.out_dir, name)
            os.makedirs(os.path.dirname(os.path.abspath(p)), exist_ok=True)
            try:
                with open(p, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise WriterError(f"cannot write {p}: {exc.strerror or exc}") from exc
            self.report.outputs.append(p)

    # commands

    def open_db(self, files):
        if isinstance(files, str):
            files = [files]
        if not isinstance(files, list) or not files or not all(isinstance(f, str) for f in files):
            raise RunError("open_db() needs a list of file names")
        configs = load_configs([self.path(f) for f in files])
        self.set_pool(CandidatePool(tuple(configs)))
        self._seen_warnings = 0
        self.state.network = self.state.ups = self.state.performance = None

    def constraint(self, expr):
        self.set_pool(apply_constraint(self.pool(), _text(expr, "constraint")))

    def metric(self, expr):
        self.set_pool(define_metric(self.pool(), _text(expr, "metric")))

    def select_best(self, metric, direction):
        self.set_pool(select_best(self.pool(), _text(metric, "select_best"), direction))

    def rank_and_trim(self, metric, fraction):
        if not is_number(fraction):
            raise RunError("rank_and_trim() fraction must be a number")
        self.set_pool(rank_and_trim(self.pool(), _text(metric, "rank_and_trim"), float(fraction)))

    def delete(self):
        self.set_pool(delete(self.pool()))

    def update_metrics(self):
        self.set_pool(update_metrics(self.pool()))

    def set_option(self, key, value):
        self.state.options[key] = check_option(key, value)

    def performance(self, target):
        pool = self.pool()
        if not len(pool):
            raise RunError("candidate pool is empty")
        spec = self.state.perf_spec
        if target is not None:
            if not is_number(target):
                raise RunError(f"performance target must be a number, got {target!r}")
            nodes = [solve_inverse(float(target), c.metrics, spec).nodes for c in pool]
            pool = set_metric(pool, "nodes", nodes)
        perf = [direct_performance(c.metrics, self.node_count(c), spec) for c in pool]
        self.set_pool(set_metric(pool, "performance", perf))
        self.state.performance = perf[0] if len(perf) == 1 else None

    def network(self, topology, objective):
        if str(topology).lower() not in ("fat-tree", "fattree", "fat_tree"):
            raise RunError(f"unsupported topology {topology!r} (only 'fat-tree' is implemented)")
        c = self.single()
        n = self.node_count(c)
        switches = switch_catalogue(load_configs([self.path(f) for f in self.state.options["network.catalog"]]))
        edges, cores = _filter_switches(switches, c.metrics)
        self.state.network = design_fattree(n, edges, _text(objective, "network"), core_catalogue=cores)
        self.state.ups = None

    def ups(self, backup_min, objective):
        c = self.single()
        if self.state.network is None:
            raise RunError("network required: call network() before ups()")
        n = self.node_count(c)
        node_w = c.metrics.get("node_power", 0.0)
        if not is_number(node_w):
            raise RunError("metric 'node_power' must be numeric")
        load = (n * node_w + self.state.network.totals["power"]) / 1000.0
        units = load_configs([self.path(f) for f in self.state.options["ups.catalog"]])
        self.state.ups = design_ups(load, backup_min, units, _text(objective, "ups"))

    def add_group(self, name):
        name = _text(name, "add_group")
        if not name or ":" in name:
            raise RunError(f"invalid group name {name!r}")
        c = self.single()
        n = self.node_count(c)
        net = self.state.network
        if net is None:
            raise RunError("network required: call network() before add_group()")
        if net.n_nodes != n:
            raise RunError(f"network was designed for {net.n_nodes} nodes but 'nodes' is now {n}; re-run network()")
        ups = self.state.ups
        g = Group(name, c, n, net, ups, build_compute_blocks(c.metrics, n, net, name),
                  core_devices(net, name), ups_devices(ups, name))
        try:
            self.state.design.add_group(g)
        except ValueError as exc:
            raise RunError(str(exc)) from exc
        self.state.design.geometry = self.state.geometry
        self.state.network = self.state.ups = None

    def place(self, place_params):
        params = dict(place_params or {})
        design = self.state.design
        if not design.groups:
            raise RunError("no equipment groups: call add_group() before place()")
        spacing = params.pop("spacing", self.state.options["layout.spread"])
        common = params.pop("strategy", None)
        strategies = {}
        for key, kind in (("core", "core_switch"), ("blocks", "block"), ("ups", "ups_unit")):
            v = params.pop(key, common)
            if v is not None:
                strategies[kind] = Strategy.parse(v, spacing)
        if params:
            raise RunError(f"unknown place() parameter(s): {', '.join(sorted(params))}")
        geometry = self.state.geometry
        p = place([b for g in design.groups for b in g.blocks],
                  [d for g in design.groups for d in g.cores],
                  [d for g in design.groups for d in g.ups_units],
                  strategies, geometry.rack_height_u)
        design.geometry = geometry
        design.placement = p
        design.floor = plan_floor(p.rack_count, geometry)
        design.cables = None

    def cables(self):
        design = self.state.design
        if design.placement is None:
            raise RunError("placement required: call place() before cables()")
        out = []
        for g in design.groups:
            out += route_cables(design.placement, design.floor, g.network, g.blocks, g.cores,
                                start=len(out), geometry=design.geometry)
        design.cables = out
        self.emit("cables.csv", format_cable_table(out))

    def print_design(self, file):
        summary = summarize(self.state.design, self.state.cost_params)
        name = file or "design.txt"
        text = write_summary(summary)
        self.report.summary = summary
        self.report.stdout += text
        if self.out_dir is not None:
            p = os.path.join(self.out_dir, name)
            write_summary(summary, p)
            self.report.outputs += [p, os.path.splitext(p)[0] + ".json"]
        self.report.documents[name] = text

    def draw_rows(self, rows, file):
        if rows is not None and not isinstance(rows, list):
            rows = [rows]
        design = self.state.design
        if design.placement is None:
            raise RunError("placement required: call place() before draw_rows()")
        self.emit(_text(file, "draw_rows"), draw_rows(design.placement, design.floor, rows))


def _text(v, cmd):
    if not isinstance(v, str):
        raise RunError(f"{cmd}() expects a string, got {v!r}")
    return v


def _filter_switches(switches, node_metrics):
    """Edge switches must match the node's interconnect and vendor; cores only the interconnect."""
    tech = node_metrics.get("network_tech")
    techs = frozenset([tech]) if isinstance(tech, str) else (tech if isinstance(tech, frozenset) else None)
    vendor = node_metrics.get("network_vendor")
    cores = [s for s in switches if techs is None or s.technology & techs]
    edges = [s for s in cores if not isinstance(vendor, str) or s.vendor == vendor]
    if not edges:
        want = ", ".join(sorted(techs)) if techs else "any technology"
        extra = f" from vendor '{vendor}'" if isinstance(vendor, str) else ""
        raise RunError(f"switch catalogue has no {want} switches{extra}")
    return edges, cores


def execute(script, options=None, base_dir=".", out_dir=None) -> RunReport:
    """Run ``script`` (text or parsed) and report what happened.

    Execution stops at the first failing command; the report then carries
    the error and everything produced up to that point.  File names in the
    script resolve against ``base_dir``; outputs go to ``out_dir`` (kept in
    memory only when it is None).
    """
    if isinstance(script, str):
        script = parse_script(script)
    report = RunReport()
    try:
        runner = _Runner(options, base_dir, out_dir, report)
    except RunError as exc:
        report.error = str(exc)
        return report
    report.state = runner.state
    for cmd in script.commands:
        try:
            getattr(runner, cmd.name)(**cmd.args)
        except DOMAIN_ERRORS as exc:
            report.error = f"line {cmd.line}: {cmd.name}(): {exc}"
            report.error_line = cmd.line
            log.info(report.error)
            return report
        report.executed += 1
    return report


def run_file(path, options=None, out_dir=None) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    return execute(source, options, base_dir=os.path.dirname(os.path.abspath(path)), out_dir=out_dir)
