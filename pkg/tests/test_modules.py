import os

import pytest

from holdall import (
    Value, wrap, arg,
    module_register, import_module, describe_module, unload,
    DefinitionError, PluginImportError, UsageError, LifetimeError,
)


def api_root():
    return Value({
        "add": wrap(lambda a, b: a + b, arg("a", type=int),
                    arg("b", type=int), name="add"),
        "version": 3,
        "__doc__": "in-process fixture module",
    })


def test_register_and_import():
    module_register("fixture", api_root())
    m = import_module("fixture")
    assert m["version"].to_python() == 3
    assert m["add"](2, 3).to_python() == 5
    assert "add" in m
    assert "nope" not in m


def test_import_is_idempotent():
    module_register("fixture", api_root())
    a = import_module("fixture")
    b = import_module("fixture")
    assert a is b


def test_register_requires_object_root():
    with pytest.raises(DefinitionError):
        module_register("bad", Value([1, 2]))
    with pytest.raises(DefinitionError):
        module_register("", api_root())


def test_missing_module_lists_tried_paths():
    with pytest.raises(PluginImportError) as ei:
        import_module("definitely_not_here")
    assert ei.value.tried
    assert any("definitely_not_here" in p for p in ei.value.tried)


def test_search_path_env(hello_plugin, monkeypatch):
    monkeypatch.setenv("SVAR_MODULE_PATH", os.path.dirname(hello_plugin))
    m = import_module("hello")
    assert m["version"].to_python() == 1
    # cached under both the env-resolved spec and the derived name
    assert import_module("hello") is m


def test_import_by_explicit_path(hello_plugin):
    m = import_module(hello_plugin)
    assert m.name == "hello"
    assert m.origin == hello_plugin


def test_describe_in_process():
    module_register("fixture", api_root())
    d = describe_module(import_module("fixture"))
    entries = d["entries"]
    assert entries["version"].to_python() == 3
    assert entries["add"]["name"].to_python() == "add"
    assert d["origin"].to_python() == "in-process"


def test_describe_plugin(hello_plugin):
    d = describe_module(import_module(hello_plugin))
    assert d["abi_version"].to_python() == 1
    assert "Person" in d["entries"]


def test_unload_in_process_refused():
    module_register("fixture", api_root())
    with pytest.raises(UsageError):
        unload("fixture")


def test_unload_plugin_and_double_unload(hello_plugin):
    m = import_module(hello_plugin)
    unload(m)
    with pytest.raises(LifetimeError):
        m["echo"](1)
    with pytest.raises(UsageError):
        unload(m)


def test_reimport_after_unload(hello_plugin):
    m = import_module(hello_plugin)
    unload(m)
    m2 = import_module(hello_plugin)
    assert m2["kw_f"](4, 5).to_python() == 9
