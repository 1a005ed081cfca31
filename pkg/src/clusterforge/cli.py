"""Command line: ``clusterforge run`` and ``clusterforge serve``."""
from __future__ import annotations

import argparse
import logging
import sys

from .graph import DatabaseError, load_configs
from .dsl.runner import RunError, check_option, parse_option_value, run_file
from .dsl.script import ScriptError

EXIT_OK, EXIT_SCRIPT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="clusterforge", description="Design clusters and data centres from component databases.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="execute a design script")
    run.add_argument("script")
    run.add_argument("--option", "-o", action="append", default=[], metavar="KEY=VALUE",
                     help="initial option, e.g. econ.electricity_usd_per_kwh=0.2 (repeatable)")
    run.add_argument("--out", default=".", metavar="DIR", help="directory for output files (default: .)")

    serve = sub.add_parser("serve", help="serve the network and UPS designers over HTTP")
    serve.add_argument("--bind", default="127.0.0.1:8080", metavar="HOST:PORT")
    serve.add_argument("--catalog", nargs="+", required=True, metavar="FILE",
                       help="switch and UPS databases (told apart by their metrics)")
    return p


def _options(pairs):
    out = {}
    for item in pairs:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise RunError(f"option must look like KEY=VALUE, got {item!r}")
        out[key.strip()] = check_option(key.strip(), parse_option_value(raw.strip()))
    return out


def _bind(text):
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit() or int(port) > 65535:
        raise ValueError(f"--bind needs HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def cmd_run(args, parser):
    try:
        options = _options(args.option)
    except RunError as exc:
        parser.error(str(exc))
    try:
        report = run_file(args.script, options, out_dir=args.out)
    except OSError as exc:
        print(f"clusterforge: cannot read {args.script}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScriptError as exc:
        print(f"clusterforge: {args.script}: {exc}", file=sys.stderr)
        return EXIT_SCRIPT
    sys.stdout.write(report.stdout)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not report.ok:
        print(f"clusterforge: {args.script}: {report.error}", file=sys.stderr)
        return EXIT_SCRIPT
    for path in report.outputs:
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args, parser):
    from .dsl.service import make_server

    try:
        host, port = _bind(args.bind)
    except ValueError as exc:
        parser.error(str(exc))
    switches, units = [], []
    try:
        for f in args.catalog:
            for c in load_configs([f]):
                if "ports" in c.metrics:
                    switches.append(c)
                elif "capacity_kw" in c.metrics:
                    units.append(c)
    except (OSError, DatabaseError) as exc:
        print(f"clusterforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        server = make_server(host, port, switches, units)
    except OSError as exc:
        print(f"clusterforge: cannot bind {host}:{port}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_SCRIPT
    print(f"serving on http://{host}:{server.server_address[1]} "
          f"({len(switches)} switch and {len(units)} UPS configurations)", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args, parser)
    return cmd_serve(args, parser)


if __name__ == "__main__":
    sys.exit(main())
