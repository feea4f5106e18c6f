"""Process-wide module registry, plugin import and unload.

A module is a name bound to a root Object value.  In-process code
registers one with `module_register`; `import_module` first consults
the registry, then searches for a plugin shared object: an explicit
path is used as-is, a bare name is tried as lib<name>.<ext> and
<name>.<ext> in each directory of the SVAR_MODULE_PATH environment
variable (os.pathsep separated) and finally the working directory.

`unload` severs a plugin module: the registry entry disappears and
every value that crossed the boundary raises LifetimeError on its next
use.  The shared object itself stays mapped; re-importing the same
path builds a fresh link.
"""

import logging
import os
import sys
import threading

from .errors import DefinitionError, PluginImportError, UsageError
from .value import Kind, Value

log = logging.getLogger(__name__)

SEARCH_ENV = "SVAR_MODULE_PATH"

_LOCK = threading.RLock()
_MODULES = {}


class ModuleHandle:
    """Registry entry: name, root Object, origin, optional plugin link."""

    __slots__ = ("name", "root", "origin", "link", "unloaded")

    def __init__(self, name, root, origin=None, link=None):
        self.name = name
        self.root = root
        self.origin = origin
        self.link = link
        self.unloaded = False

    @property
    def abi_version(self):
        return None if self.link is None else self.link.table.abi_version()

    def __getitem__(self, key):
        if self.unloaded:
            from .errors import LifetimeError
            raise LifetimeError(f"module {self.name!r} was unloaded")
        return self.root[key]

    def __contains__(self, key):
        return key in self.root

    def describe(self):
        return describe_module(self)

    def __repr__(self):
        origin = self.origin or "in-process"
        return f"<ModuleHandle {self.name} ({origin})>"


def module_register(name, root):
    """Bind `name` to a root Object.  Re-binding replaces (with a warning)."""
    if not isinstance(name, str) or not name:
        raise DefinitionError("module name must be a non-empty string")
    if not isinstance(root, Value):
        root = Value(root)
    if root.kind != Kind.OBJECT:
        raise DefinitionError(
            f"module root must be an Object, got {root.kind.name}")
    handle = ModuleHandle(name, root)
    with _LOCK:
        if name in _MODULES:
            log.warning("module %r re-registered; previous binding replaced", name)
        _MODULES[name] = handle
    return handle


def import_module(spec):
    """Find a module by name or plugin path.

    Registered names win; otherwise the plugin search runs and the
    loaded module is cached under both the requested spec and its
    derived name.  Raises PluginImportError when nothing is found.
    """
    if not isinstance(spec, str) or not spec:
        raise DefinitionError("module spec must be a non-empty string")
    with _LOCK:
        cached = _MODULES.get(spec)
        if cached is not None:
            return cached
        name, path, tried = _find_plugin(spec)
        if path is None:
            raise PluginImportError(
                f"no module named {spec!r}; tried: " + ", ".join(tried),
                tried=tried)
        from .plugin import PluginLink
        link = PluginLink(path)
        handle = ModuleHandle(name, link.root(), origin=path, link=link)
        _MODULES[spec] = handle
        _MODULES.setdefault(name, handle)
        return handle


def _candidate_names(name):
    if sys.platform == "darwin":
        return [f"lib{name}.dylib", f"{name}.dylib", f"lib{name}.so", f"{name}.so"]
    if sys.platform.startswith("win"):
        return [f"{name}.dll", f"lib{name}.dll"]
    return [f"lib{name}.so", f"{name}.so"]


def _find_plugin(spec):
    # explicit paths skip the search entirely
    if os.sep in spec or spec.endswith((".so", ".dylib", ".dll")):
        name = os.path.basename(spec)
        for ext in (".so", ".dylib", ".dll"):
            name = name.removesuffix(ext)
        name = name.removeprefix("lib")
        if os.path.isfile(spec):
            return name, spec, [spec]
        return name, None, [spec]
    tried = []
    dirs = []
    env = os.environ.get(SEARCH_ENV, "")
    dirs.extend(d for d in env.split(os.pathsep) if d)
    dirs.append(os.getcwd())
    for d in dirs:
        for fname in _candidate_names(spec):
            p = os.path.join(d, fname)
            tried.append(p)
            if os.path.isfile(p):
                return spec, p, tried
    return spec, None, tried


def _describe_entry(v):
    k = v.kind
    if k in (Kind.FUNCTION, Kind.CLASS):
        return v._data.describe()
    if k == Kind.OBJECT:
        return Value({key: _describe_entry(e) for key, e in v.items()})
    if k == Kind.ARRAY:
        return Value([_describe_entry(e) for e in v])
    if k in (Kind.NULL, Kind.BOOL, Kind.INTEGER, Kind.REAL, Kind.STRING):
        return v
    return Value({"kind": k.name})


def describe_module(handle):
    """Self-description Object: name, origin and one entry per member."""
    if isinstance(handle, str):
        handle = import_module(handle)
    entries = {key: _describe_entry(v) for key, v in handle.root.items()}
    d = {
        "name": handle.name,
        "origin": handle.origin or "in-process",
        "entries": entries,
    }
    if handle.link is not None:
        d["abi_version"] = handle.abi_version
    return Value(d)


def unload(target):
    """Unload a plugin module.  In-process modules refuse; so does a
    second unload of the same handle."""
    handle = target
    if isinstance(target, str):
        with _LOCK:
            handle = _MODULES.get(target)
        if handle is None:
            raise UsageError(f"no module named {target!r} to unload")
    if handle.link is None:
        raise UsageError(f"module {handle.name!r} is in-process; nothing to unload")
    if handle.unloaded:
        raise UsageError(f"module {handle.name!r} is already unloaded")
    handle.unloaded = True
    handle.link.invalidate()
    with _LOCK:
        for key in [k for k, h in _MODULES.items() if h is handle]:
            del _MODULES[key]
    log.info("module %s unloaded (origin %s)", handle.name, handle.origin)


def _registered_modules():
    with _LOCK:
        return dict(_MODULES)
