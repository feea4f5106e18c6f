"""Command-line front door.

Subcommands: doc, call, convert, serve, bench.  JSON goes to stdout,
diagnostics to stderr.  Exit codes: 0 success, 1 usage error, 2
runtime error.
"""

import argparse
import logging
import sys

from .value import Value, Kind
from .codec import parse_json, dump_json
from .cbor import dump_cbor, load_cbor
from .errors import Error, ParseError
from .modules import import_module, describe_module

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _build_parser():
    p = _Parser(prog="holdall",
                description="inspect, call, convert, serve, benchmark")
    p.add_argument("-v", "--verbose", action="store_true",
                   help="log at debug level")
    sub = p.add_subparsers(dest="cmd", metavar="command")

    d = sub.add_parser("doc", parents=[], help="describe a module",
                       description="print a module's description as JSON")
    d.add_argument("module", help="module name or plugin path")
    d.add_argument("--entry", help="limit output to one entry")

    c = sub.add_parser("call", help="call an exported function")
    c.add_argument("module")
    c.add_argument("function")
    c.add_argument("args", nargs="?", default=None,
                   help="positional arguments as a JSON array")
    c.add_argument("--kw", action="append", default=[], metavar="KEY=VAL",
                   help="keyword argument; VAL parsed as JSON, else string")
    c.add_argument("--pretty", action="store_true")

    v = sub.add_parser("convert", help="convert between json and cbor")
    v.add_argument("--from", dest="src", choices=("json", "cbor"),
                   required=True)
    v.add_argument("--to", dest="dst", choices=("json", "cbor"),
                   required=True)
    v.add_argument("infile")
    v.add_argument("outfile")
    v.add_argument("--pretty", action="store_true")

    s = sub.add_parser("serve", help="serve a module over HTTP")
    s.add_argument("module")
    s.add_argument("--bind", default="127.0.0.1:8080", metavar="HOST:PORT")

    b = sub.add_parser("bench", help="run timing reports")
    b.add_argument("files", nargs="*", help="JSON corpus files")
    b.add_argument("--calls", type=int, default=None, metavar="N",
                   help="also run the call-overhead report with N calls")
    b.add_argument("--out-dir", default=None,
                   help="write CSV and PNG charts here")
    b.add_argument("--repeat", type=int, default=3)

    return p


def _print_value(v, pretty=False):
    if v.kind == Kind.UNDEFINED:
        sys.stdout.write("null\n")
        return
    try:
        text = dump_json(v, indent=2 if pretty else None)
    except Error:
        text = str(v)
    sys.stdout.write(text + "\n")


def _loose(text):
    # JSON when it parses, bare string otherwise
    try:
        return parse_json(text)
    except ParseError:
        return Value(text)


def _cmd_doc(ns):
    mod = import_module(ns.module)
    d = describe_module(mod)
    if ns.entry:
        entries = d["entries"]
        if ns.entry not in entries:
            sys.stderr.write(f"holdall: no entry {ns.entry!r} "
                             f"in {ns.module}\n")
            return 1
        d = entries[ns.entry]
    _print_value(d, pretty=True)
    return 0


def _cmd_call(ns):
    mod = import_module(ns.module)
    if ns.function not in mod:
        sys.stderr.write(f"holdall: no entry {ns.function!r} "
                         f"in {ns.module}\n")
        return 1
    fn = mod[ns.function]
    if fn.kind not in (Kind.FUNCTION, Kind.CLASS):
        sys.stderr.write(f"holdall: {ns.function!r} is not callable "
                         f"(kind {fn.kind.name})\n")
        return 1
    pos = []
    if ns.args is not None:
        parsed = parse_json(ns.args)
        if parsed.kind != Kind.ARRAY:
            sys.stderr.write("holdall: args must be a JSON array\n")
            return 1
        pos = list(parsed)
    kw = {}
    for item in ns.kw:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            sys.stderr.write(f"holdall: bad --kw {item!r}, "
                             f"expected KEY=VAL\n")
            return 1
        kw[key] = _loose(raw)
    result = fn(*pos, **kw)
    _print_value(result, pretty=ns.pretty)
    return 0


def _cmd_convert(ns):
    with open(ns.infile, "rb") as f:
        raw = f.read()
    v = parse_json(raw) if ns.src == "json" else load_cbor(raw)
    if ns.dst == "json":
        out = dump_json(v, indent=2 if ns.pretty else None).encode("utf-8")
        out += b"\n"
    else:
        out = dump_cbor(v)
    with open(ns.outfile, "wb") as f:
        f.write(out)
    return 0


def _cmd_serve(ns):
    from .gateway import serve
    mod = import_module(ns.module)
    server = serve(mod, bind=ns.bind)
    sys.stderr.write(f"serving {ns.module} at {server.url}\n")
    try:
        server.wait()
    except KeyboardInterrupt:
        sys.stderr.write("shutting down\n")
        server.shutdown()
    return 0


def _cmd_bench(ns, parser):
    if not ns.files and ns.calls is None:
        parser.error("bench needs corpus files or --calls")
    from . import bench

    ser = None
    calls = None
    if ns.files:
        ser = bench.bench_serialize(ns.files, repeat=ns.repeat)
        out = sys.stdout
        for row in bench.serialize_csv_rows(ser):
            out.write(",".join(row) + "\n")
    if ns.calls is not None:
        calls = bench.bench_calls(ns.calls)
        for row in bench.calls_csv_rows(calls):
            sys.stdout.write(",".join(row) + "\n")
    if ns.out_dir:
        written = bench.render_report(ns.out_dir, ser, calls)
        for path in written:
            sys.stderr.write(f"wrote {path}\n")
    return 0


def main(argv=None):
    parser = _build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if ns.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    if ns.cmd is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        if ns.cmd == "doc":
            return _cmd_doc(ns)
        if ns.cmd == "call":
            return _cmd_call(ns)
        if ns.cmd == "convert":
            return _cmd_convert(ns)
        if ns.cmd == "serve":
            return _cmd_serve(ns)
        if ns.cmd == "bench":
            return _cmd_bench(ns, parser)
        parser.error(f"unknown command {ns.cmd!r}")
    except SystemExit:
        raise
    except KeyboardInterrupt:
        return 130
    except (Error, OSError, ValueError) as e:
        log.debug("failure", exc_info=True)
        sys.stderr.write(f"holdall: {type(e).__name__}: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
