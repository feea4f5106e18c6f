"""Plugin loading and value traffic.

One Link owns everything tied to a loaded library: the dlopened
handle, the plugin's entry table, the host-side table we hand back,
and the registry of handles we have minted for the plugin to read.
Data crossing the boundary is copied; functions, classes and
instances are proxied in both directions.
"""
import ctypes as C
import logging
import os
import threading
import warnings

from . import _abi
from ._abi import SvarEntryTable

log = logging.getLogger("svarbridge")

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

_BUFFER_FORMATS = set("bBhHiIqQfdc")


class AbiError(ImportError):
    """The library loaded but does not speak ABI version 1."""


class PluginError(RuntimeError):
    """A call into the plugin failed; message comes from the plugin."""


class LossyConversionWarning(UserWarning):
    pass


class _HostBuffer:
    # normalized outbound form of bytes-like payloads
    __slots__ = ("fmt", "shape", "data")

    def __init__(self, fmt, shape, data):
        self.fmt = fmt
        self.shape = shape
        self.data = data


class _HostError:
    __slots__ = ("message",)

    def __init__(self, message):
        self.message = message


def from_host(x):
    """Normalize a host object into its sendable form.

    Scalars, strings, bytes-likes, lists, dicts, callables and bridge
    proxies all cross; anything else raises TypeError.  Integers
    beyond int64 degrade to Real with a warning.
    """
    if x is None or isinstance(x, (bool, float, str)):
        return x
    if isinstance(x, int):
        if INT64_MIN <= x <= INT64_MAX:
            return x
        warnings.warn(f"integer {x} exceeds int64; sending as real",
                      LossyConversionWarning, stacklevel=2)
        return float(x)
    if isinstance(x, (bytes, bytearray)):
        return _HostBuffer("c", (len(x),), bytes(x))
    if isinstance(x, memoryview):
        if x.format not in _BUFFER_FORMATS:
            raise TypeError(f"unsupported buffer format {x.format!r}")
        if not x.c_contiguous:
            raise TypeError("only C-contiguous memory crosses the bridge")
        return _HostBuffer(x.format, tuple(x.shape), x.tobytes())
    if isinstance(x, (list, tuple)):
        return [from_host(e) for e in x]
    if isinstance(x, dict):
        out = {}
        for k, v in x.items():
            if not isinstance(k, str):
                raise TypeError("object keys must be strings")
            out[k] = from_host(v)
        return out
    if isinstance(x, (_HostBuffer, _HostError)):
        return x
    if isinstance(x, (BridgedFunction, BridgedClass, BridgedInstance)):
        return x
    if callable(x):
        return x
    raise TypeError(f"cannot send {type(x).__name__} across the bridge")


def to_host(x):
    """Materialize a received value as plain host data.

    Mostly the identity: the bridge already hands back natives.
    Instances and functions stay proxies, buffers stay memoryviews.
    """
    if x is None or isinstance(x, (bool, int, float, str, memoryview)):
        return x
    if isinstance(x, (BridgedFunction, BridgedClass, BridgedInstance)):
        return x
    if isinstance(x, (list, tuple)):
        return [to_host(e) for e in x]
    if isinstance(x, dict):
        return {k: to_host(v) for k, v in x.items()}
    if callable(x):
        return x
    raise TypeError(f"{type(x).__name__} did not come from the bridge")


_MISSING = object()


class _HostSide:
    """Registry of host-minted handles plus the table exposing them."""

    def __init__(self, link):
        self.link = link
        self._lock = threading.Lock()
        self._next = 1
        self._objects = {}
        self.table = self._build_table()

    def mint(self, obj):
        with self._lock:
            h = self._next
            self._next += 1
            self._objects[h] = obj
        return h

    def release(self, h):
        with self._lock:
            self._objects.pop(h, None)

    def get(self, h):
        with self._lock:
            return self._objects.get(h, _MISSING)

    # table callbacks.  None may raise: unwinding into C is undefined,
    # so each body catches everything and fails in-band.

    def _build_table(self):
        def abi_version():
            return 1

        def module_root():
            return 0

        def value_kind(h):
            obj = self.get(h)
            if obj is _MISSING:
                return -1
            return _kind_of(obj)

        def value_clone(h):
            obj = self.get(h)
            if obj is _MISSING:
                return 0
            return self.mint(obj)

        def value_release(h):
            self.release(h)

        def value_int(h):
            obj = self.get(h)
            try:
                if isinstance(obj, bool):
                    return int(obj)
                if isinstance(obj, int):
                    return obj
                if isinstance(obj, float):
                    return int(obj)
            except (ValueError, OverflowError):
                pass
            return 0

        def value_real(h):
            obj = self.get(h)
            if isinstance(obj, (bool, int, float)):
                return float(obj)
            return 0.0

        def value_string(h, buf, cap):
            obj = self.get(h)
            if isinstance(obj, _HostError):
                obj = obj.message
            if not isinstance(obj, str):
                return 0
            raw = obj.encode("utf-8")
            if buf and cap:
                n = min(len(raw), cap)
                C.memmove(buf, raw, n)
            return len(raw)

        def value_buffer(h, fmt, shape, cap_dims, ndim, data, cap):
            obj = self.get(h)
            if not isinstance(obj, _HostBuffer):
                return 0
            if fmt:
                fmt[0] = obj.fmt.encode("ascii")
            if ndim:
                ndim[0] = len(obj.shape)
            if shape:
                for i in range(min(len(obj.shape), cap_dims)):
                    shape[i] = obj.shape[i]
            if data and cap:
                n = min(len(obj.data), cap)
                C.memmove(data, obj.data, n)
            return len(obj.data)

        def array_size(h):
            obj = self.get(h)
            return len(obj) if isinstance(obj, list) else 0

        def array_get(h, idx):
            obj = self.get(h)
            if not isinstance(obj, list) or idx >= len(obj):
                return 0
            return self.mint(obj[idx])

        def object_keys(h):
            obj = self.get(h)
            if not isinstance(obj, dict):
                return 0
            return self.mint([str(k) for k in obj])

        def object_get(h, key):
            obj = self.get(h)
            if not isinstance(obj, dict):
                return 0
            try:
                k = key.decode("utf-8")
            except Exception:
                return 0
            if k not in obj:
                return 0
            return self.mint(obj[k])

        def object_set(h, key, val):
            obj = self.get(h)
            if not isinstance(obj, dict):
                return 1
            try:
                obj[key.decode("utf-8")] = _import(self.link, val,
                                                   owned=False)
                return 0
            except Exception:
                log.exception("host object_set failed")
                return 1

        def call(fn, n_pos, pos, n_kw, kw_names, kw_vals,
                 out_result, out_error):
            target = self.get(fn)
            try:
                if not callable(target):
                    raise TypeError("handle is not callable")
                args = [_import(self.link, pos[i], owned=False)
                        for i in range(n_pos)]
                kwargs = {}
                for j in range(n_kw):
                    name = kw_names[j].decode("utf-8")
                    kwargs[name] = _import(self.link, kw_vals[j],
                                           owned=False)
                result = target(*args, **kwargs)
                out_result[0] = self.mint(from_host(result))
                return 0
            except Exception as e:
                log.debug("host callback failed", exc_info=True)
                msg = f"{type(e).__name__}: {e}"
                out_error[0] = self.mint(_HostError(msg))
                return 1

        def describe(h):
            return 0

        t = SvarEntryTable()
        # the CFUNCTYPE objects must outlive the link; pin them
        self._pins = [
            _abi.FN_ABI_VERSION(abi_version),
            _abi.FN_MODULE_ROOT(module_root),
            _abi.FN_VALUE_KIND(value_kind),
            _abi.FN_VALUE_CLONE(value_clone),
            _abi.FN_VALUE_RELEASE(value_release),
            _abi.FN_VALUE_INT(value_int),
            _abi.FN_VALUE_REAL(value_real),
            _abi.FN_VALUE_STRING(value_string),
            _abi.FN_VALUE_BUFFER(value_buffer),
            _abi.FN_ARRAY_SIZE(array_size),
            _abi.FN_ARRAY_GET(array_get),
            _abi.FN_OBJECT_KEYS(object_keys),
            _abi.FN_OBJECT_GET(object_get),
            _abi.FN_OBJECT_SET(object_set),
            _abi.FN_CALL(call),
            _abi.FN_DESCRIBE(describe),
        ]
        for (name, _), fn in zip(SvarEntryTable._fields_, self._pins):
            setattr(t, name, fn)
        return t


def _kind_of(obj):
    if obj is None:
        return _abi.NULL
    if isinstance(obj, bool):
        return _abi.BOOL
    if isinstance(obj, int):
        return _abi.INTEGER
    if isinstance(obj, float):
        return _abi.REAL
    if isinstance(obj, str):
        return _abi.STRING
    if isinstance(obj, _HostBuffer):
        return _abi.BUFFER
    if isinstance(obj, list):
        return _abi.ARRAY
    if isinstance(obj, dict):
        return _abi.OBJECT
    if isinstance(obj, _HostError):
        return _abi.ERROR
    if isinstance(obj, BridgedClass):
        return _abi.CLASS
    if isinstance(obj, BridgedInstance):
        return _abi.INSTANCE
    if callable(obj):
        return _abi.FUNCTION
    return -1


class Link:
    """Everything pinned for the life of one loaded library."""

    def __init__(self, lib, origin):
        self.lib = lib
        self.origin = origin
        self.alive = True
        self.host = _HostSide(self)
        self._table_ptr = None
        self.table = None

    def attach(self, table_ptr):
        self._table_ptr = table_ptr
        self.table = table_ptr.contents

    def release(self, h):
        if self.alive and h:
            try:
                self.table.value_release(h)
            except Exception:
                pass


def _read_string(link, h):
    n = link.table.value_string(h, None, 0)
    if n == 0:
        return ""
    buf = C.create_string_buffer(int(n))
    link.table.value_string(h, buf, n)
    return buf.raw[:n].decode("utf-8")


def _read_buffer(link, h):
    fmt = C.create_string_buffer(1)
    shape = (C.c_uint64 * 8)()
    ndim = C.c_uint64(0)
    n = link.table.value_buffer(h, fmt, shape, 8, C.byref(ndim), None, 0)
    data = (C.c_uint8 * max(int(n), 1))()
    link.table.value_buffer(h, None, None, 0, None, data, n)
    code = fmt.raw[:1].decode("ascii") or "c"
    dims = tuple(int(shape[i]) for i in range(int(ndim.value)))
    mv = memoryview(bytes(data[: int(n)]))
    try:
        return mv.cast(code, dims) if dims else mv.cast(code)
    except TypeError:
        return mv


def _import(link, h, owned):
    """Read a plugin handle into host terms.

    Data kinds are copied (and released when we own the handle);
    behavior kinds become proxies that adopt the handle, cloning
    first when it was only borrowed.
    """
    t = link.table
    if not h:
        return None
    k = t.value_kind(h)
    try:
        if k in (_abi.UNDEFINED, _abi.NULL):
            return None
        if k == _abi.BOOL:
            return bool(t.value_int(h))
        if k == _abi.INTEGER:
            return int(t.value_int(h))
        if k == _abi.REAL:
            return float(t.value_real(h))
        if k == _abi.STRING:
            return _read_string(link, h)
        if k == _abi.BUFFER:
            return _read_buffer(link, h)
        if k == _abi.ARRAY:
            out = []
            for i in range(int(t.array_size(h))):
                ch = t.array_get(h, i)
                out.append(_import(link, ch, owned=True))
            return out
        if k == _abi.OBJECT:
            kh = t.object_keys(h)
            keys = _import(link, kh, owned=True)
            out = {}
            for key in keys or []:
                gh = t.object_get(h, key.encode("utf-8"))
                if gh:
                    out[key] = _import(link, gh, owned=True)
            return out
        if k == _abi.ERROR:
            return PluginError(_read_string(link, h))
        if k in (_abi.FUNCTION, _abi.CLASS, _abi.INSTANCE):
            keep = h if owned else t.value_clone(h)
            owned = False            # the proxy adopts it; no release here
            cls = {_abi.FUNCTION: BridgedFunction,
                   _abi.CLASS: BridgedClass,
                   _abi.INSTANCE: BridgedInstance}[k]
            return cls(link, keep)
        log.warning("unknown kind %d from plugin; dropping", k)
        return None
    finally:
        if owned:
            link.release(h)


def _call(link, fn_h, args, kwargs):
    """Invoke a plugin function or class handle."""
    host = link.host
    minted = []
    try:
        pos_hs = []
        for a in args:
            hh = host.mint(from_host(a))
            minted.append(hh)
            pos_hs.append(hh)
        names = []
        kw_hs = []
        for k, v in kwargs.items():
            hh = host.mint(from_host(v))
            minted.append(hh)
            names.append(k.encode("utf-8"))
            kw_hs.append(hh)

        pos_arr = (C.c_uint64 * max(len(pos_hs), 1))(*pos_hs)
        kw_arr = (C.c_uint64 * max(len(kw_hs), 1))(*kw_hs)
        name_arr = (C.c_char_p * max(len(names), 1))(*names)
        res = C.c_uint64(0)
        err = C.c_uint64(0)
        st = link.table.call(fn_h, len(pos_hs), pos_arr,
                             len(names), name_arr, kw_arr,
                             C.byref(res), C.byref(err))
        if st:
            e = _import(link, err.value, owned=True)
            msg = e.args[0] if isinstance(e, PluginError) else str(e)
            raise PluginError(msg)
        return _import(link, res.value, owned=True)
    finally:
        for hh in minted:
            host.release(hh)


class _Proxy:
    _link = None
    _h = 0

    def __init__(self, link, h):
        object.__setattr__(self, "_link", link)
        object.__setattr__(self, "_h", h)

    def __del__(self):
        try:
            self._link.release(self._h)
        except Exception:
            pass


class BridgedFunction(_Proxy):
    """A plugin function that feels like a local callable."""

    def __init__(self, link, h):
        super().__init__(link, h)
        d = _describe(link, h)
        object.__setattr__(self, "__name__", d.get("name", "<anonymous>"))
        object.__setattr__(self, "__doc__", d.get("doc") or None)

    def __call__(self, *args, **kwargs):
        return _call(self._link, self._h, args, kwargs)

    def __repr__(self):
        return f"<bridged function {self.__name__}>"


class BridgedClass(_Proxy):
    """A plugin class; calling it constructs a bridged instance."""

    def __init__(self, link, h):
        super().__init__(link, h)
        d = _describe(link, h)
        object.__setattr__(self, "__name__", d.get("name", "<class>"))
        object.__setattr__(self, "__doc__", d.get("doc") or None)

    def __call__(self, *args, **kwargs):
        return _call(self._link, self._h, args, kwargs)

    def __repr__(self):
        return f"<bridged class {self.__name__}>"


class BridgedInstance(_Proxy):
    """Attribute access proxies to the plugin-side object."""

    def __getattr__(self, name):
        if name.startswith("__"):
            raise AttributeError(name)
        gh = self._link.table.object_get(self._h, name.encode("utf-8"))
        if not gh:
            raise AttributeError(
                f"{_describe(self._link, self._h).get('class', 'instance')}"
                f" has no member {name!r}")
        return _import(self._link, gh, owned=True)

    def __setattr__(self, name, value):
        if name.startswith("_"):
            object.__setattr__(self, name, value)
            return
        hh = self._link.host.mint(from_host(value))
        try:
            st = self._link.table.object_set(self._h,
                                             name.encode("utf-8"), hh)
        finally:
            self._link.host.release(hh)
        if st:
            raise AttributeError(f"cannot set {name!r}")

    def __repr__(self):
        cls = _describe(self._link, self._h).get("class", "?")
        return f"<bridged {cls} instance>"


def _describe(link, h):
    dh = link.table.describe(h)
    if not dh:
        return {}
    d = _import(link, dh, owned=True)
    return d if isinstance(d, dict) else {}


class BridgedModule:
    """Loaded plugin presented as a namespace of natives and proxies."""

    def __init__(self, link, name, entries):
        self._link = link
        self._entries = entries
        self.__name__ = name
        doc = entries.get("__doc__")
        self.__doc__ = doc if isinstance(doc, str) else None

    @property
    def origin(self):
        return self._link.origin

    def __getattr__(self, name):
        try:
            return self._entries[name]
        except KeyError:
            raise AttributeError(
                f"module {self.__name__!r} exports no {name!r}") from None

    def __dir__(self):
        return sorted(set(super().__dir__()) | set(self._entries))

    def __repr__(self):
        return f"<bridged module {self.__name__} from {self.origin}>"


def _candidates(spec):
    if os.sep in spec or spec.endswith(".so") or os.path.isfile(spec):
        yield spec
        return
    search = os.environ.get("SVAR_MODULE_PATH", "")
    for d in [d for d in search.split(":") if d] + ["."]:
        yield os.path.join(d, f"lib{spec}.so")
        yield os.path.join(d, f"{spec}.so")


def load(spec):
    """Load a plugin by name (searched on SVAR_MODULE_PATH) or path."""
    tried = []
    path = None
    for cand in _candidates(spec):
        if os.path.isfile(cand):
            path = cand
            break
        tried.append(cand)
    if path is None:
        raise ImportError(f"no plugin {spec!r}; tried {tried}")

    try:
        lib = C.CDLL(os.path.abspath(path))
    except OSError as e:
        raise ImportError(f"cannot load {path}: {e}") from None
    try:
        entry = getattr(lib, _abi.ENTRY_SYMBOL)
    except AttributeError:
        raise AbiError(f"{path} exports no {_abi.ENTRY_SYMBOL}") from None
    entry.restype = C.POINTER(SvarEntryTable)
    entry.argtypes = [C.POINTER(SvarEntryTable)]

    link = Link(lib, os.path.abspath(path))
    ptr = entry(C.byref(link.host.table))
    if not ptr:
        raise AbiError(f"{path} refused to load")
    link.attach(ptr)
    got = link.table.abi_version()
    if got != 1:
        raise AbiError(f"{path} speaks ABI {got}, need 1")

    root_h = link.table.module_root()
    entries = _import(link, root_h, owned=True)
    if not isinstance(entries, dict):
        raise AbiError(f"{path} has no module root")

    name = os.path.basename(path)
    if name.startswith("lib"):
        name = name[3:]
    name = name.rsplit(".", 1)[0]
    log.info("loaded %s from %s (%d entries)", name, path, len(entries))
    return BridgedModule(link, name, entries)
