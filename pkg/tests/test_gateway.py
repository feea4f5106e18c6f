import json
import urllib.request

import pytest

from holdall import (
    Value, wrap, arg, serve, module_register, import_module,
    http_get, http_post, http_call,
    dump_cbor, load_cbor, HttpError, IoError, CallError, DefinitionError,
)


def api_root():
    return Value({
        "sum": wrap(lambda a, b: a + b, arg("a", type=int),
                    arg("b", type=int), name="sum"),
        "print": wrap(lambda json: json, arg("json"), name="print"),
        "fail": wrap(lambda: 1 / 0, name="fail"),
        "version": 1,
        "nested": {
            "upper": wrap(lambda s: s.upper(), arg("s", type=str),
                          name="upper"),
        },
    })


@pytest.fixture
def server():
    module_register("api", api_root())
    with serve("api", bind="127.0.0.1:0") as srv:
        yield srv


def test_get_with_query_kwargs(server):
    v = http_get(f"{server.url}/sum?a=1&b=2")
    assert v.to_python() == 3


def test_get_reserved_args_parameter(server):
    v = http_get(f"{server.url}/print?args=hello")
    assert v.to_python() == "hello"


def test_get_plain_value(server):
    assert http_get(f"{server.url}/version").to_python() == 1


def test_get_nested_path(server):
    v = http_get(f"{server.url}/nested/upper?s=abc")
    assert v.to_python() == "ABC"


def test_describe_at_root(server):
    d = http_get(server.url + "/")
    entries = d["entries"]
    assert "sum" in entries
    assert entries["version"].to_python() == 1


def test_post_object_maps_to_kwargs(server):
    v = http_post(f"{server.url}/sum", Value({"a": 4, "b": 5}))
    assert v.to_python() == 9


def test_post_object_falls_back_to_single_argument(server):
    body = Value({"x": 1, "y": [2, 3]})
    v = http_post(f"{server.url}/print", body)
    assert v.to_python() == {"x": 1, "y": [2, 3]}


def test_post_array_maps_to_positionals(server):
    v = http_post(f"{server.url}/sum", Value([7, 8]))
    assert v.to_python() == 15


def test_post_cbor_body(server):
    blob = dump_cbor(Value({"a": 2, "b": 3}))
    req = urllib.request.Request(
        f"{server.url}/sum", data=blob, method="POST",
        headers={"Content-Type": "application/cbor",
                 "Accept": "application/cbor"})
    with urllib.request.urlopen(req, timeout=5) as resp:
        body = resp.read()
        assert resp.headers["Content-Type"].startswith("application/cbor")
    assert load_cbor(body).to_python() == 5


def test_missing_function_404(server):
    with pytest.raises(HttpError) as ei:
        http_get(f"{server.url}/missing")
    assert ei.value.status == 404
    payload = json.loads(ei.value.body)
    assert payload["kind"] == "NotFound"


def test_bad_arguments_400(server):
    with pytest.raises(HttpError) as ei:
        http_get(f"{server.url}/sum?a=1&b=oops")
    assert ei.value.status == 400
    assert "error" in json.loads(ei.value.body)


def test_callee_crash_500(server):
    with pytest.raises(HttpError) as ei:
        http_get(f"{server.url}/fail")
    assert ei.value.status == 500


def test_http_call_kwargs(server):
    assert http_call(f"{server.url}/sum", a=10, b=20).to_python() == 30


def test_http_call_positional(server):
    assert http_call(f"{server.url}/sum", 2, 3).to_python() == 5


def test_closed_port_is_io_error():
    with pytest.raises(IoError):
        http_get("http://127.0.0.1:9/version", timeout=2)


def test_bad_bind_rejected():
    module_register("api", api_root())
    with pytest.raises(DefinitionError):
        serve("api", bind="127.0.0.1:notaport")
    with pytest.raises(DefinitionError):
        serve("api", bind="127.0.0.1:70000")


def test_serve_object_root_directly():
    with serve(api_root(), bind="127.0.0.1:0") as srv:
        assert http_get(f"{srv.url}/sum?a=1&b=1").to_python() == 2


def test_transport_transparency(server):
    """Served results match direct invocation wherever both succeed."""
    root = api_root()
    cases = [("sum", {"a": 3, "b": 9}), ("print", {"args": '"zz"'})]
    direct = root["sum"](a=3, b=9)
    via = http_call(f"{server.url}/sum", a=3, b=9)
    assert via == direct
    with pytest.raises(CallError):
        root["sum"](a=3)
    with pytest.raises(HttpError) as ei:
        http_call(f"{server.url}/sum", a=3)
    assert ei.value.status == 400
