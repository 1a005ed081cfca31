"""HTTP front end for the network and UPS designers.

    GET /network?nodes=N[&topology=fat-tree][&objective=cost]
    GET /ups?load_kw=X[&backup_min=Y][&objective=cost]

Responses are JSON.  Bad queries get 400, infeasible requests 422.
"""
from __future__ import annotations

import json
import logging
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from ..expr import ExprError
from ..network import NetworkDesignError, NoFeasibleNetwork, design_fattree, switch_catalogue
from ..ups import UpsDesignError, design_ups, ups_catalogue

log = logging.getLogger(__name__)


class BadQuery(Exception):
    pass


def _one(q, name, required=True):
    vals = q.get(name)
    if not vals:
        if required:
            raise BadQuery(f"missing parameter '{name}'")
        return None
    if len(vals) > 1:
        raise BadQuery(f"parameter '{name}' given more than once")
    return vals[0]


def _number(q, name, required=True):
    raw = _one(q, name, required)
    if raw is None:
        return None
    try:
        v = float(raw)
    except ValueError:
        raise BadQuery(f"parameter '{name}' must be a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise BadQuery(f"parameter '{name}' must be finite")
    return v


def network_response(query: dict, catalogue) -> tuple:
    """(status, document) for a /network query; ``query`` is parse_qs output."""
    try:
        raw = _one(query, "nodes")
        if not raw.isdigit() or int(raw) < 1:
            raise BadQuery(f"parameter 'nodes' must be a positive integer, got {raw!r}")
        topology = _one(query, "topology", required=False) or "fat-tree"
        if topology not in ("fat-tree", "fattree"):
            raise BadQuery(f"unsupported topology {topology!r}")
        objective = _one(query, "objective", required=False) or "cost"
        return 200, design_fattree(int(raw), catalogue, objective).to_dict()
    except BadQuery as exc:
        return 400, {"error": str(exc)}
    except NoFeasibleNetwork as exc:
        return 422, {"error": str(exc)}
    except (NetworkDesignError, ExprError) as exc:
        return 400, {"error": str(exc)}


def ups_response(query: dict, catalogue) -> tuple:
    try:
        load = _number(query, "load_kw")
        if load <= 0:
            raise BadQuery("parameter 'load_kw' must be positive")
        backup = _number(query, "backup_min", required=False)
        if backup is not None and backup < 0:
            raise BadQuery("parameter 'backup_min' must be non-negative")
        objective = _one(query, "objective", required=False) or "cost"
        return 200, design_ups(load, backup, catalogue, objective).to_dict()
    except BadQuery as exc:
        return 400, {"error": str(exc)}
    except (UpsDesignError, ExprError) as exc:
        return (422 if "no UPS offers" in str(exc) else 400), {"error": str(exc)}


def encode(doc) -> bytes:
    return (json.dumps(doc, sort_keys=True) + "\n").encode("utf-8")


def make_handler(switches, ups_units):
    switches, ups_units = tuple(switches), tuple(ups_units)
    routes = {"/network": lambda q: network_response(q, switches),
              "/ups": lambda q: ups_response(q, ups_units)}

    class Handler(BaseHTTPRequestHandler):
        server_version = "clusterforge"

        def do_GET(self):
            url = urlsplit(self.path)
            route = routes.get(url.path)
            if route is None:
                status, doc = 404, {"error": f"no such endpoint {url.path!r}"}
            else:
                try:
                    q = parse_qs(url.query, keep_blank_values=True, strict_parsing=bool(url.query))
                except ValueError:
                    status, doc = 400, {"error": "malformed query string"}
                else:
                    status, doc = route(q)
            body = encode(doc)
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, fmt, *args):
            log.info("%s %s", self.address_string(), fmt % args)

    return Handler


def make_server(host, port, switches, ups_units) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(switch_catalogue(switches), ups_catalogue(ups_units)))


def serve_in_thread(server):
    t = threading.Thread(target=server.serve_forever, daemon=True)
    t.start()
    return t
