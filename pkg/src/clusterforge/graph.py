"""Component databases and configuration graphs.

A database is a set of XML files describing partitions (one per function
of the product: board, CPU socket, memory, ...), the vertices that may fill
each partition, and optional compatibility edges between consecutive
partitions.  Every Start-to-End path through the resulting layered graph is
one configuration; the metric map of a configuration is what you get by
applying each vertex's expressions in path order.

Example file::

    <database>
      <vertex id="B" label="Intel Xeon E5-2690 v2">
        <expr metric="node_cost" value="+2850"/>
      </vertex>
      <partition name="cpu1" position="2">
        <use vertex="B"/>
      </partition>
      <edges>
        <edge from="M" to="B"/>
      </edges>
    </database>
"""
from __future__ import annotations

import logging
import os
import re
import xml.sax
from dataclasses import dataclass, field, replace

from .expr import ExprError, VertexExpr, apply, is_identifier, parse_vertex_expr

log = logging.getLogger(__name__)

VERTEX_ID_RE = re.compile(r"[A-Za-z0-9_.+\-]+\Z")


class DatabaseError(Exception):
    def __init__(self, message, source=None, line=None):
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.source = source
        self.line = line


@dataclass(frozen=True)
class VertexDef:
    id: str
    label: str = ""
    exprs: tuple = ()


@dataclass
class Partition:
    name: str
    position: int
    members: list = field(default_factory=list)  # vertex ids, in order

    def instance(self, vertex_id: str) -> str:
        return f"{self.name}:{vertex_id}"

    @property
    def instances(self):
        return [self.instance(v) for v in self.members]


@dataclass(frozen=True)
class Configuration:
    metrics: dict
    path: tuple
    origin_index: int

    def with_metrics(self, metrics) -> "Configuration":
        return replace(self, metrics=metrics)

    def __getitem__(self, name):
        return self.metrics[name]

    def get(self, name, default=None):
        return self.metrics.get(name, default)


class ConfigGraph:
    """Layered DAG: partitions in position order, edges only between neighbours.

    A pair of neighbouring partitions without any explicit edge is fully
    connected.
    """

    def __init__(self, vertices, partitions, edges=(), explicit=()):
        self.vertices = dict(vertices)
        self.partitions = sorted(partitions, key=lambda p: p.position)
        self.edges = frozenset(edges)
        self.explicit = frozenset(explicit)
        if not self.partitions:
            raise DatabaseError("graph has no partitions")
        self._succ = {}
        for (a, b) in self.edges:
            self._succ.setdefault(a, []).append(b)

    def successors(self, layer: int, instance: str):
        """Instances of partition ``layer + 1`` reachable from ``instance``."""
        nxt = self.partitions[layer + 1]
        if layer not in self.explicit:
            return nxt.instances
        allowed = set(self._succ.get(instance, ()))
        return [i for i in nxt.instances if i in allowed]

    def vertex_of(self, instance: str) -> VertexDef:
        return self.vertices[instance.split(":", 1)[1]]

    def __repr__(self):
        sizes = "x".join(str(len(p.members)) for p in self.partitions)
        return f"<ConfigGraph partitions={sizes} edges={len(self.edges)}>"


def enumerate_configs(g: ConfigGraph) -> list:
    """Depth-first walk of every Start-to-End path, in partition/member order."""
    out = []
    last = len(g.partitions) - 1

    def walk(layer, instance, path, metrics):
        for e in g.vertex_of(instance).exprs:
            metrics = apply(e, metrics)
        path = path + (instance,)
        if layer == last:
            out.append(Configuration(metrics, path, len(out)))
            return
        for nxt in g.successors(layer, instance):
            walk(layer + 1, nxt, path, metrics)

    try:
        for first in g.partitions[0].instances:
            walk(0, first, (), {})
    except ExprError as exc:
        raise DatabaseError(f"while evaluating vertex expressions: {exc}") from exc
    if not out:
        log.warning("configuration graph %r generates no configurations", g)
    return out


def path_count(g: ConfigGraph) -> int:
    """Number of configurations, by dynamic programming over the layers."""
    counts = {i: 1 for i in g.partitions[0].instances}
    for layer in range(len(g.partitions) - 1):
        nxt = {}
        for inst, n in counts.items():
            for s in g.successors(layer, inst):
                nxt[s] = nxt.get(s, 0) + n
        counts = nxt
    return sum(counts.values())


# ---------------------------------------------------------------------------
# XML loading
# ---------------------------------------------------------------------------

@dataclass
class _Node:
    tag: str
    attrs: dict
    line: int
    children: list = field(default_factory=list)


class _TreeHandler(xml.sax.ContentHandler):
    def __init__(self):
        super().__init__()
        self.root = None
        self.stack = []
        self._locator = None

    def setDocumentLocator(self, locator):
        self._locator = locator

    def startElement(self, name, attrs):
        line = self._locator.getLineNumber() if self._locator else None
        node = _Node(name, dict(attrs.items()), line)
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.root = node
        self.stack.append(node)

    def endElement(self, name):
        self.stack.pop()


_ALLOWED = {
    "database": ({"version"}, {"partition", "vertex", "edges"}),
    "partition": ({"name", "position"}, {"vertex", "use"}),
    "vertex": ({"id", "label"}, {"expr"}),
    "expr": ({"metric", "value"}, set()),
    "use": ({"vertex"}, set()),
    "edges": (set(), {"edge"}),
    "edge": ({"from", "to"}, set()),
}


class _Builder:
    def __init__(self):
        self.vertices = {}
        self.partitions = {}
        self.positions = {}
        self.uses = []   # (partition, vertex id, source, line)
        self.edges = []  # (from, to, source, line)

    def add_file(self, path):
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise DatabaseError(f"cannot read database file: {exc.strerror}", path) from exc
        self.add_text(data, source=path)

    def add_text(self, data, source="<string>"):
        if isinstance(data, str):
            data = data.encode("utf-8")
        handler = _TreeHandler()
        try:
            xml.sax.parseString(data, handler)
        except xml.sax.SAXParseException as exc:
            raise DatabaseError(f"malformed XML: {exc.getMessage()}", source, exc.getLineNumber()) from exc
        root = handler.root
        if root.tag != "database":
            raise DatabaseError(f"root element must be <database>, found <{root.tag}>", source, root.line)
        self._check(root, source)
        for child in root.children:
            if child.tag == "vertex":
                self._vertex(child, source)
            elif child.tag == "partition":
                self._partition(child, source)
            else:
                for edge in child.children:
                    for key in ("from", "to"):
                        if key not in edge.attrs:
                            raise DatabaseError(f"<edge> needs a '{key}' attribute", source, edge.line)
                    self.edges.append((edge.attrs["from"], edge.attrs["to"], source, edge.line))

    def _check(self, node, source):
        attrs, children = _ALLOWED[node.tag]
        for a in node.attrs:
            if a not in attrs:
                raise DatabaseError(f"unexpected attribute '{a}' on <{node.tag}>", source, node.line)
        for c in node.children:
            if c.tag not in children:
                raise DatabaseError(f"unexpected element <{c.tag}> inside <{node.tag}>", source, c.line)
            self._check(c, source)

    def _vertex(self, node, source) -> str:
        vid = node.attrs.get("id")
        if not vid or not VERTEX_ID_RE.match(vid):
            raise DatabaseError(f"<vertex> needs a valid 'id', got {vid!r}", source, node.line)
        exprs = []
        for e in node.children:
            metric, value = e.attrs.get("metric"), e.attrs.get("value")
            if metric is None or value is None:
                raise DatabaseError("<expr> needs 'metric' and 'value' attributes", source, e.line)
            try:
                exprs.append(parse_vertex_expr(metric, value))
            except ExprError as exc:
                raise DatabaseError(f"vertex '{vid}': {exc}", source, e.line) from exc
        self.vertices[vid] = VertexDef(vid, node.attrs.get("label", vid), tuple(exprs))
        return vid

    def _partition(self, node, source):
        name = node.attrs.get("name")
        if not name or not is_identifier(name):
            raise DatabaseError(f"<partition> needs a valid 'name', got {name!r}", source, node.line)
        pos_text = node.attrs.get("position")
        position = None
        if pos_text is not None:
            try:
                position = int(pos_text)
            except ValueError:
                position = 0
            if position < 1:
                raise DatabaseError(f"partition '{name}': position must be a positive integer", source, node.line)
        part = self.partitions.get(name)
        if part is None:
            if position is None:
                raise DatabaseError(f"partition '{name}' needs a 'position'", source, node.line)
            if position in self.positions:
                raise DatabaseError(
                    f"duplicate partition position {position} ('{self.positions[position]}' and '{name}')",
                    source, node.line)
            part = Partition(name, position)
            self.partitions[name] = part
            self.positions[position] = name
        elif position is not None and position != part.position:
            raise DatabaseError(
                f"partition '{name}' redeclared with position {position} (was {part.position})", source, node.line)
        for child in node.children:
            if child.tag == "vertex":
                vid = self._vertex(child, source)
            else:
                vid = child.attrs.get("vertex")
                if not vid:
                    raise DatabaseError("<use> needs a 'vertex' attribute", source, child.line)
                self.uses.append((name, vid, source, child.line))
            if vid not in part.members:
                part.members.append(vid)

    def build(self) -> ConfigGraph:
        for pname, vid, source, line in self.uses:
            if vid not in self.vertices:
                raise DatabaseError(f"partition '{pname}' uses undefined vertex '{vid}'", source, line)
        parts = sorted(self.partitions.values(), key=lambda p: p.position)
        if not parts:
            raise DatabaseError("graph has no partitions")
        layer_of = {p.name: i for i, p in enumerate(parts)}
        edges, explicit = set(), set()
        for src, dst, source, line in self.edges:
            found = False
            for a in _resolve(src, parts):
                for b in _resolve(dst, parts):
                    la, lb = layer_of[a.split(":")[0]], layer_of[b.split(":")[0]]
                    if lb == la + 1:
                        edges.add((a, b))
                        explicit.add(la)
                        found = True
            if not found:
                raise DatabaseError(
                    f"edge {src} -> {dst} does not connect instances in consecutive partitions", source, line)
        return ConfigGraph(self.vertices, parts, edges, explicit)


def _resolve(ref: str, parts) -> list:
    if ":" in ref:
        pname, vid = ref.split(":", 1)
        return [f"{p.name}:{vid}" for p in parts if p.name == pname and vid in p.members]
    return [p.instance(ref) for p in parts if ref in p.members]


def load_db(files) -> ConfigGraph:
    """Load and merge database files in order; later vertex definitions win."""
    if isinstance(files, (str, os.PathLike)):
        files = [files]
    b = _Builder()
    for f in files:
        b.add_file(os.fspath(f))
    return b.build()


def parse_db(*texts: str) -> ConfigGraph:
    """Like :func:`load_db` but from XML strings (handy for tests and services)."""
    b = _Builder()
    for i, t in enumerate(texts):
        b.add_text(t, source=f"<text {i}>")
    return b.build()


def load_configs(files) -> list:
    return enumerate_configs(load_db(files))
