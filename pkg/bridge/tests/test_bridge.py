import os
import struct
import sys

import pytest

import svarbridge
from svarbridge import (
    AbiError, BridgedClass, BridgedFunction, BridgedInstance,
    LossyConversionWarning, PluginError, from_host, to_host,
)

from conftest import BRIDGE_ROOT, PLUGIN_SO


def test_load_by_name_and_by_path(hello, hello_so):
    assert hello.__name__ == "hello"
    assert hello.origin == os.path.abspath(hello_so)
    again = svarbridge.load(hello_so)
    assert again.version == 1


def test_missing_module_raises_import_error(monkeypatch):
    monkeypatch.setenv("SVAR_MODULE_PATH", "/nonexistent")
    with pytest.raises(ImportError) as ei:
        svarbridge.load("no_such_plugin")
    assert "no_such_plugin" in str(ei.value)


def test_not_a_plugin_raises_abi_error(tmp_path):
    bogus = tmp_path / "libnope.so"
    bogus.write_bytes(b"\x7fELF not really")
    with pytest.raises(ImportError):
        svarbridge.load(str(bogus))


def test_scalar_exports_are_native(hello):
    assert hello.version == 1
    assert isinstance(hello.version, int)
    assert isinstance(hello.__doc__, str)


def test_say_prints_and_returns_none(hello, capfd):
    assert hello.say("hello world") is None
    assert "hello world" in capfd.readouterr().err


def test_say_rejects_non_string(hello):
    with pytest.raises(PluginError):
        hello.say(123)


def test_functions_feel_native(hello):
    f = hello.kw_f
    assert isinstance(f, BridgedFunction)
    assert f.__name__ == "kw_f"
    assert callable(f)


def test_kwargs_cross_the_boundary(hello):
    assert hello.kw_f(3) == 3
    assert hello.kw_f(1, 5) == 6
    assert hello.kw_f(1, b=5) == 6
    assert hello.kw_f(b=2, a=1) == 3
    assert hello.kw_f(1, 2, 3) == 6       # 3-ary overload


def test_echo_copies_structures(hello):
    src = {"a": [1, 2.5, None, True], "b": "text", "c": {"d": []}}
    out = hello.echo(src)
    assert out == src
    out["a"].append(99)                   # a copy, not a view
    assert hello.echo(src) == src


def test_echo_round_trips_buffers(hello):
    raw = struct.pack("<6d", *range(6))
    mv = memoryview(raw).cast("d", (2, 3))
    back = hello.echo(mv)
    assert isinstance(back, memoryview)
    assert back.format == "d"
    assert tuple(back.shape) == (2, 3)
    assert back.tobytes() == raw


def test_bytes_cross_as_buffers(hello):
    back = hello.echo(b"\x01\x02\x03")
    assert isinstance(back, memoryview)
    assert back.tobytes() == b"\x01\x02\x03"


def test_classes_construct_instances(hello):
    assert isinstance(hello.Person, BridgedClass)
    p = hello.Person("me")
    assert isinstance(p, BridgedInstance)
    assert p.intro() == '{"name":"me"}'
    assert p.info() == '{"name":"me"}'


def test_instance_state_reads_and_writes(hello):
    p = hello.Person("ada")
    assert p.name == "ada"
    p.name = "grace"
    assert p.info() == '{"name":"grace"}'


def test_missing_member_raises_attribute_error(hello):
    p = hello.Person("x")
    with pytest.raises(AttributeError):
        p.fly()


def test_constructor_arity_failure(hello):
    with pytest.raises(PluginError):
        hello.Person()


def test_host_callback_from_plugin(hello):
    calls = []

    def triple(x):
        calls.append(x)
        return 3 * x

    assert hello.apply(triple, 14) == 42
    assert calls == [14]
    assert isinstance(calls[0], int)


def test_host_callback_error_surfaces(hello):
    def boom(x):
        raise ValueError("no thanks")

    with pytest.raises(PluginError) as ei:
        hello.apply(boom, 1)
    assert "no thanks" in str(ei.value)


def test_plugin_function_passed_back(hello):
    f = hello.echo(hello.kw_f)             # function through data path
    assert f(2, 3) == 5
    assert hello.apply(hello.kw_f, 7) == 7


def test_missing_export_raises_attribute_error(hello):
    with pytest.raises(AttributeError):
        hello.frobnicate


def test_dir_lists_exports(hello):
    names = dir(hello)
    for want in ("say", "echo", "kw_f", "Person", "version"):
        assert want in names


def test_from_host_normalizes():
    assert from_host(None) is None
    assert from_host(True) is True
    assert from_host([1, "a", {"k": 2.5}]) == [1, "a", {"k": 2.5}]
    with pytest.raises(TypeError):
        from_host({1, 2})
    with pytest.raises(TypeError):
        from_host(object())
    with pytest.raises(TypeError):
        from_host({1: "non-string key"})


def test_from_host_degrades_big_ints():
    with pytest.warns(LossyConversionWarning):
        sent = from_host(2 ** 70)
    assert isinstance(sent, float)


def test_to_host_materializes():
    assert to_host({"a": [1, 2]}) == {"a": [1, 2]}
    assert to_host("x") == "x"
    with pytest.raises(TypeError):
        to_host(object())


def test_to_host_keeps_proxies(hello):
    p = hello.Person("z")
    assert to_host(p) is p


def test_no_primary_package_involvement(hello):
    """The bridge speaks only the C table: no host-library imports."""
    src_dir = os.path.join(BRIDGE_ROOT, "src", "svarbridge")
    for fn in os.listdir(src_dir):
        if fn.endswith(".py"):
            body = open(os.path.join(src_dir, fn), encoding="utf-8").read()
            assert "holdall" not in body, fn
    mods = [m for m in sys.modules if m.split(".")[0] == "holdall"]
    assert mods == []
