"""HTTP gateway: expose a module's functions over a socket.

Each member of the root Object is served at /name (nested Objects
extend the path).  GET passes query parameters as keyword arguments,
each JSON-parsed when possible and kept as a string otherwise; the
reserved `args` parameter is comma-split into positional arguments.
POST bodies (JSON by default, CBOR with Content-Type: application/cbor)
bind an Object as keyword arguments, an Array as positionals and any
other value as the single argument.  GET / returns the module
description.  Responses are JSON unless the request prefers CBOR via
the Accept header.

Binding errors map to 400, unknown paths to 404, everything else to
500, with an ``{"error": ..., "kind": ...}`` body.
"""

import json
import logging
import socket
import threading
import urllib.error
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qsl, urlsplit

from . import cbor as cbor_codec
from . import codec
from .errors import (
    ArityError,
    CallError,
    CastError,
    DefinitionError,
    Error,
    HttpError,
    IoError,
    MemberError,
    NotFoundError,
    ParseError,
    RangeError,
)
from .modules import ModuleHandle, describe_module
from .value import Kind, Value

log = logging.getLogger(__name__)

_BAD_REQUEST = (ParseError, CallError, CastError, ArityError, RangeError)
_NOT_FOUND = (NotFoundError, MemberError)


def _parse_bind(bind):
    host, sep, port_s = bind.rpartition(":")
    if not sep:
        raise DefinitionError(f"bind must look like host:port, got {bind!r}")
    try:
        port = int(port_s)
    except ValueError:
        raise DefinitionError(f"invalid port in {bind!r}") from None
    if not 0 <= port <= 65535:
        # port 0 asks the OS for a free port; server.url reports it
        raise DefinitionError(f"port {port} outside [0, 65535]")
    return host or "127.0.0.1", port


class GatewayServer:
    """Running server; use as a context manager or call shutdown()."""

    def __init__(self, handle, host, port):
        self.handle = handle
        self._httpd = ThreadingHTTPServer((host, port), _Handler)
        self._httpd.daemon_threads = True
        self._httpd.gateway = self
        self._thread = None
        self.host, self.port = self._httpd.server_address[:2]

    @property
    def url(self):
        return f"http://{self.host}:{self.port}"

    def start(self):
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, name="gateway", daemon=True)
        self._thread.start()
        return self

    def wait(self):
        """Block until shutdown() is called from another thread."""
        if self._thread is not None:
            self._thread.join()

    def shutdown(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()
        return False


def serve(root, bind="127.0.0.1:8080"):
    """Serve a module (handle, name or root Object) at host:port."""
    if isinstance(root, str):
        from .modules import import_module
        handle = import_module(root)
    elif isinstance(root, ModuleHandle):
        handle = root
    else:
        root = root if isinstance(root, Value) else Value(root)
        handle = ModuleHandle("service", root)
    host, port = _parse_bind(bind)
    try:
        server = GatewayServer(handle, host, port)
    except OSError as e:
        raise IoError(f"cannot bind {bind}: {e}") from None
    return server.start()


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        log.debug("gateway: " + fmt, *args)

    # -- plumbing ----------------------------------------------------

    def _send(self, status, body, content_type):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _wants_cbor(self):
        return "application/cbor" in self.headers.get("Accept", "")

    def _send_value(self, v):
        if self._wants_cbor():
            body = b"\xf6" if v.is_undefined() else cbor_codec.dump_cbor(v)
            self._send(200, body, "application/cbor")
            return
        text = "null" if v.is_undefined() else codec.dump_json(v)
        self._send(200, text.encode("utf-8"), "application/json; charset=utf-8")

    def _send_error_value(self, e):
        if isinstance(e, _NOT_FOUND):
            status = 404
        elif isinstance(e, _BAD_REQUEST):
            status = 400
        else:
            status = 500
            log.exception("gateway handler failed", exc_info=e)
        kind = getattr(e, "kind", type(e).__name__)
        body = json.dumps({"error": str(e), "kind": kind}).encode("utf-8")
        self._send(status, body, "application/json; charset=utf-8")

    def _resolve(self, path):
        segments = [s for s in path.split("/") if s]
        node = self.server.gateway.handle.root
        walked = []
        for s in segments:
            walked.append(s)
            if node.kind != Kind.OBJECT or s not in node:
                raise NotFoundError("no entry at /" + "/".join(walked))
            node = node[s]
        return node, segments

    # -- verbs -------------------------------------------------------

    def do_GET(self):
        try:
            split = urlsplit(self.path)
            node, segments = self._resolve(split.path)
            if not segments:
                self._send_value(describe_module(self.server.gateway.handle))
                return
            pos, kw = _query_arguments(split.query)
            if node.kind == Kind.FUNCTION:
                self._send_value(node(*pos, **kw))
            elif pos or kw:
                raise CallError(f"/{'/'.join(segments)} is not callable")
            else:
                self._send_value(node)
        except Exception as e:
            self._send_error_value(e)

    def do_POST(self):
        try:
            split = urlsplit(self.path)
            node, segments = self._resolve(split.path)
            if node.kind != Kind.FUNCTION:
                raise CallError(f"/{'/'.join(segments)} is not callable")
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            ctype = self.headers.get("Content-Type", "")
            if "application/cbor" in ctype:
                payload = cbor_codec.load_cbor(raw) if raw else Value()
            else:
                payload = codec.parse_json(raw) if raw else Value()
            self._send_value(_call_with_payload(node, payload))
        except Exception as e:
            self._send_error_value(e)


def _call_with_payload(fn, payload):
    k = payload.kind
    if k == Kind.OBJECT:
        kw = dict(payload.items())
        try:
            return fn(**kw)
        except CallError:
            # functions of one generic parameter take the object whole
            return fn(payload)
    if k == Kind.ARRAY:
        return fn(*payload.as_(list))
    if k == Kind.UNDEFINED:
        return fn()
    return fn(payload)


def _query_arguments(query):
    pos = []
    kw = {}
    for key, raw in parse_qsl(query, keep_blank_values=True):
        if key == "args":
            if raw:
                pos.extend(_loose_value(tok) for tok in raw.split(","))
        else:
            kw[key] = _loose_value(raw)
    return pos, kw


def _loose_value(token):
    # JSON when it parses, plain string otherwise
    try:
        return codec.parse_json(token)
    except ParseError:
        return Value(token)


# -- client ----------------------------------------------------------

def _decode_response(resp):
    raw = resp.read()
    if not raw:
        return Value()
    ctype = resp.headers.get("Content-Type", "")
    if "application/cbor" in ctype:
        return cbor_codec.load_cbor(raw)
    return codec.parse_json(raw)


def _request(url, data=None, headers=None, timeout=10.0):
    req = urllib.request.Request(url, data=data, headers=headers or {})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return _decode_response(resp)
    except urllib.error.HTTPError as e:
        body = e.read().decode("utf-8", "replace")
        raise HttpError(e.code, body) from None
    except urllib.error.URLError as e:
        raise IoError(f"cannot reach {url}: {e.reason}") from None
    except (socket.timeout, TimeoutError):
        raise IoError(f"timeout talking to {url}") from None


def http_get(url, timeout=10.0):
    """GET a gateway URL and decode the response Value."""
    return _request(url, timeout=timeout)


def http_post(url, payload=None, format="json", timeout=10.0):
    """POST a Value (JSON or CBOR body) and decode the response."""
    v = payload if isinstance(payload, Value) else Value(payload)
    if format == "cbor":
        data = b"" if v.is_undefined() else cbor_codec.dump_cbor(v)
        headers = {"Content-Type": "application/cbor",
                   "Accept": "application/cbor"}
    elif format == "json":
        data = b"" if v.is_undefined() else codec.dump_json(v).encode("utf-8")
        headers = {"Content-Type": "application/json"}
    else:
        raise DefinitionError(f"unknown format {format!r}")
    return _request(url, data=data, headers=headers, timeout=timeout)


def http_call(url, *args, **kwargs):
    """Call a remote function with positional and keyword arguments."""
    if args and kwargs:
        from urllib.parse import quote, urlencode
        q = {}
        if args:
            q["args"] = ",".join(_plain_token(a) for a in args)
        q.update({k: _plain_token(v) for k, v in kwargs.items()})
        return _request(url + "?" + urlencode(q))
    if kwargs:
        return http_post(url, dict(kwargs))
    if args:
        return http_post(url, list(args))
    return http_post(url, Value())


def _plain_token(x):
    v = x if isinstance(x, Value) else Value(x)
    if v.kind == Kind.STRING:
        return v.as_(str)
    return codec.dump_json(v)
