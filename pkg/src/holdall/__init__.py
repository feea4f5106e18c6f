"""holdall: one dynamic value type to carry everything.

A `Value` holds any JSON value plus buffers, functions, classes and
host objects, with shared-ownership copies.  Around it:

* `parse_json` / `dump_json` and `parse_cbor` / `dump_cbor` codecs
* `wrap` and `arg` for overloaded, keyword-aware function wrapping
* `register_class` / `dynamic_class` for reflected and scripted classes
* `module_register` / `import_module` for in-process and plugin modules
* `serve` and an HTTP client for exposing a module over a socket
* `Messenger` for in-process publish/subscribe

Quick tour::

    import holdall as ha

    v = ha.Value({"name": "mom", "age": 42})
    assert v["age"].as_(int) == 42

    add = ha.wrap(lambda a: int(a) * 2, ha.arg("a", 0), name="double")
    assert add(21).as_(int) == 42

    ha.module_register("demo", ha.Value({"double": add}))
    mod = ha.import_module("demo")
"""

from .errors import (
    AbiError,
    ArityError,
    CallError,
    CastError,
    DefinitionError,
    Error,
    HttpError,
    IoError,
    LifetimeError,
    LossyConversionWarning,
    MemberError,
    NotFoundError,
    OwnershipError,
    ParseError,
    PluginImportError,
    RangeError,
    SerializeError,
    UsageError,
)
from .value import (
    INT64_MAX,
    INT64_MIN,
    Buffer,
    HolderMode,
    Kind,
    Value,
    equals_exact,
    make,
    make_ref,
    make_shared,
    make_unique,
    ref_of,
    shared_of,
    unique_of,
)
from .functions import FunctionDef, arg, wrap
from .classes import ClassDef, dynamic_class, find_class, register_class
from .codec import dump_json, parse_json
from .cbor import dump_cbor, load_cbor
from .modules import describe_module, import_module, module_register, unload
from .messenger import Messenger
from .gateway import http_call, http_get, http_post, serve

__version__ = "0.1.0"

__all__ = [
    "AbiError", "ArityError", "Buffer", "CallError", "CastError",
    "ClassDef", "DefinitionError", "Error", "FunctionDef", "HolderMode",
    "HttpError", "INT64_MAX", "INT64_MIN", "IoError", "Kind", "LifetimeError",
    "LossyConversionWarning", "MemberError", "Messenger", "NotFoundError",
    "OwnershipError", "ParseError", "PluginImportError", "RangeError",
    "SerializeError", "UsageError", "Value", "arg", "describe_module",
    "dump_cbor", "dump_json", "dynamic_class", "equals_exact",
    "find_class", "http_call", "http_get", "http_post", "import_module",
    "load_cbor", "make", "make_ref", "make_shared", "make_unique",
    "module_register", "parse_json", "ref_of", "register_class", "serve",
    "shared_of", "unique_of", "unload", "wrap",
]
