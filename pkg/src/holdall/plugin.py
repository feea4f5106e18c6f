"""Host side of the C plugin ABI.

A plugin is a shared object exporting one symbol::

    const SvarEntryTable* svar_module_entry_v1(const SvarEntryTable* host);

Both sides hand each other the same table shape: sixteen C function
pointers over opaque 64-bit value handles.  A handle is only
meaningful to the side that emitted it, and every read of a foreign
value goes through the emitting side's table.  Data kinds (scalars,
strings, buffers, arrays, objects) are copied across the boundary;
behavior kinds (functions, classes, instances) cross as proxies that
route calls back to their home side.  See docs/abi.md for the
bit-exact contract.

Nothing here links against the plugin at build time; the only coupling
is the entry symbol name and the table layout.
"""

import ctypes
import logging
import threading

from .classes import ClassDef
from .errors import (
    AbiError,
    CallError,
    Error,
    LifetimeError,
    MemberError,
    PluginImportError,
)
from .functions import FunctionDef
from .value import Buffer, HolderMode, Kind, Value, _InstanceMeta

log = logging.getLogger(__name__)

ABI_VERSION = 1
ENTRY_SYMBOL = "svar_module_entry_v1"

HANDLE = ctypes.c_uint64
_P = ctypes.POINTER

_T_abi_version = ctypes.CFUNCTYPE(ctypes.c_uint32)
_T_module_root = ctypes.CFUNCTYPE(HANDLE)
_T_value_kind = ctypes.CFUNCTYPE(ctypes.c_int32, HANDLE)
_T_value_clone = ctypes.CFUNCTYPE(HANDLE, HANDLE)
_T_value_release = ctypes.CFUNCTYPE(None, HANDLE)
_T_value_int = ctypes.CFUNCTYPE(ctypes.c_int64, HANDLE)
_T_value_real = ctypes.CFUNCTYPE(ctypes.c_double, HANDLE)
_T_value_string = ctypes.CFUNCTYPE(
    ctypes.c_uint64, HANDLE, _P(ctypes.c_char), ctypes.c_uint64)
_T_value_buffer = ctypes.CFUNCTYPE(
    ctypes.c_uint64, HANDLE, _P(ctypes.c_char), _P(ctypes.c_uint64),
    ctypes.c_uint64, _P(ctypes.c_uint64), _P(ctypes.c_uint8), ctypes.c_uint64)
_T_array_size = ctypes.CFUNCTYPE(ctypes.c_uint64, HANDLE)
_T_array_get = ctypes.CFUNCTYPE(HANDLE, HANDLE, ctypes.c_uint64)
_T_object_keys = ctypes.CFUNCTYPE(HANDLE, HANDLE)
_T_object_get = ctypes.CFUNCTYPE(HANDLE, HANDLE, ctypes.c_char_p)
_T_object_set = ctypes.CFUNCTYPE(ctypes.c_int32, HANDLE, ctypes.c_char_p, HANDLE)
_T_call = ctypes.CFUNCTYPE(
    ctypes.c_int32, HANDLE, ctypes.c_uint64, _P(HANDLE), ctypes.c_uint64,
    _P(ctypes.c_char_p), _P(HANDLE), _P(HANDLE), _P(HANDLE))
_T_describe = ctypes.CFUNCTYPE(HANDLE, HANDLE)


class EntryTable(ctypes.Structure):
    # field order is the ABI; never reorder
    _fields_ = [
        ("abi_version", _T_abi_version),
        ("module_root", _T_module_root),
        ("value_kind", _T_value_kind),
        ("value_clone", _T_value_clone),
        ("value_release", _T_value_release),
        ("value_int", _T_value_int),
        ("value_real", _T_value_real),
        ("value_string", _T_value_string),
        ("value_buffer", _T_value_buffer),
        ("array_size", _T_array_size),
        ("array_get", _T_array_get),
        ("object_keys", _T_object_keys),
        ("object_get", _T_object_get),
        ("object_set", _T_object_set),
        ("call", _T_call),
        ("describe", _T_describe),
    ]


class _RemoteRef:
    """Owning wrapper around one foreign handle."""

    __slots__ = ("link", "handle")

    def __init__(self, link, handle):
        self.link = link
        self.handle = handle

    def __del__(self):
        try:
            self.link.release_quiet(self.handle)
        except Exception:
            pass


class RemoteFunction(FunctionDef):
    """Function living inside a plugin; calls route over the table."""

    __slots__ = ("ref",)

    def __init__(self, link, handle, name="?", doc=""):
        super().__init__(name, doc)
        self.ref = _RemoteRef(link, handle)

    def invoke(self, pos, kw):
        return self.ref.link.call_handle(self.ref.handle, pos, kw)

    def describe(self):
        d = self.ref.link.describe_value(self.ref.handle)
        if d is not None and d.kind == Kind.OBJECT:
            return d
        return super().describe()


class RemoteClassDef(ClassDef):
    """Class living inside a plugin."""

    __slots__ = ("ref",)

    def __init__(self, link, handle, name="?", doc=""):
        super().__init__(name, None, doc)
        self.dynamic = False  # instances are opaque, not state maps
        self.ref = _RemoteRef(link, handle) if handle else None

    def instantiate(self, pos, kw):
        if self.ref is None:
            raise CallError(f"remote class {self.name} is not constructible "
                            "from this side")
        return self.ref.link.call_handle(self.ref.handle, pos, kw)

    def call_member(self, v, name, pos, kw):
        ref = v._data
        link = ref.link
        mh = link.member_handle(ref.handle, name, self.name)
        try:
            return link.call_handle(mh, pos, kw)
        finally:
            link.release_quiet(mh)

    def call_static_member(self, name, pos, kw):
        if self.ref is None:
            raise MemberError(f"remote class {self.name} has no reachable statics")
        link = self.ref.link
        mh = link.member_handle(self.ref.handle, name, self.name)
        try:
            return link.call_handle(mh, pos, kw)
        finally:
            link.release_quiet(mh)

    def member_get(self, v, name):
        ref = v._data
        h = ref.link.member_handle(ref.handle, name, self.name)
        return ref.link.import_value(h, owned=True)

    def member_set(self, v, name, val):
        ref = v._data
        ref.link.remote_set(ref.handle, name, val)

    def static_get(self, name):
        if self.ref is None:
            raise MemberError(f"remote class {self.name} has no reachable statics")
        h = self.ref.link.member_handle(self.ref.handle, name, self.name)
        return self.ref.link.import_value(h, owned=True)

    def describe(self):
        if self.ref is not None:
            d = self.ref.link.describe_value(self.ref.handle)
            if d is not None and d.kind == Kind.OBJECT:
                return d
        return super().describe()


class PluginLink:
    """One loaded plugin: its table, plus our table as seen by it."""

    def __init__(self, path):
        self.path = str(path)
        self.alive = True
        self.generation = 1
        self._classdefs = {}
        try:
            self.dso = ctypes.CDLL(self.path)
        except OSError as e:
            raise PluginImportError(f"cannot load {self.path}: {e}",
                                    tried=[self.path]) from None
        try:
            entry = getattr(self.dso, ENTRY_SYMBOL)
        except AttributeError:
            raise AbiError(
                f"{self.path} does not export {ENTRY_SYMBOL}") from None
        entry.restype = _P(EntryTable)
        entry.argtypes = [_P(EntryTable)]
        self.host = _HostSide(self)
        ptr = entry(ctypes.byref(self.host.table))
        if not ptr:
            raise AbiError(f"{ENTRY_SYMBOL} of {self.path} returned NULL")
        self._table_ptr = ptr
        self.table = ptr.contents
        ver = self.table.abi_version()
        if ver != ABI_VERSION:
            raise AbiError(
                f"{self.path} speaks ABI revision {ver}, host supports {ABI_VERSION}")

    # -- lifecycle ---------------------------------------------------

    def _check(self):
        if not self.alive:
            raise LifetimeError(
                f"plugin {self.path} was unloaded (generation {self.generation})")

    def invalidate(self):
        self.alive = False
        self.generation += 1

    def release(self, h):
        if self.alive and h:
            self.table.value_release(h)

    def release_quiet(self, h):
        try:
            if self.alive and h:
                self.table.value_release(h)
        except Exception:
            pass

    # -- reading plugin values ---------------------------------------

    def root(self):
        self._check()
        h = self.table.module_root()
        if not h:
            raise AbiError(f"{self.path} returned no module root")
        v = self.import_value(h, owned=True)
        if v.kind != Kind.OBJECT:
            raise AbiError(f"module root of {self.path} is {v.kind.name}, "
                           "expected Object")
        return v

    def import_value(self, h, owned=True):
        """Copy a data handle / proxy a behavior handle into a Value."""
        self._check()
        if not h:
            return Value()
        k = self.table.value_kind(h)
        try:
            kind = Kind(k)
        except ValueError:
            if owned:
                self.release(h)
            raise AbiError(f"plugin reported unknown kind {k}")
        if kind in (Kind.FUNCTION, Kind.CLASS, Kind.INSTANCE):
            if not owned:
                h = self.table.value_clone(h)
            return self._import_proxy(kind, h)
        try:
            return self._import_data(kind, h)
        finally:
            if owned:
                self.release(h)

    def _import_data(self, kind, h):
        t = self.table
        if kind == Kind.UNDEFINED:
            return Value()
        if kind == Kind.NULL:
            return Value(None)
        if kind == Kind.BOOL:
            return Value(bool(t.value_int(h)))
        if kind == Kind.INTEGER:
            return Value(int(t.value_int(h)))
        if kind == Kind.REAL:
            return Value(float(t.value_real(h)))
        if kind == Kind.STRING:
            return Value(self._read_string(h))
        if kind == Kind.BUFFER:
            return Value(self._read_buffer(h))
        if kind == Kind.ARRAY:
            n = t.array_size(h)
            items = []
            for i in range(n):
                ch = t.array_get(h, i)
                items.append(self.import_value(ch, owned=True))
            return Value(items)
        if kind == Kind.OBJECT:
            kh = t.object_keys(h)
            keys = self.import_value(kh, owned=True)
            out = {}
            for kv in keys.as_(list):
                key = kv.as_(str)
                gh = t.object_get(h, key.encode("utf-8"))
                out[key] = self.import_value(gh, owned=True)
            return Value(out)
        # Kind.ERROR
        return Value._raw(Kind.ERROR, Error(self._read_string(h)))

    def _read_string(self, h):
        n = self.table.value_string(h, None, 0)
        if n == 0:
            return ""
        buf = ctypes.create_string_buffer(int(n))
        self.table.value_string(h, buf, n)
        return buf.raw[:n].decode("utf-8", "replace")

    def _read_buffer(self, h):
        fmt = ctypes.create_string_buffer(1)
        cap_dims = 16
        shape = (ctypes.c_uint64 * cap_dims)()
        ndim = ctypes.c_uint64()
        n = self.table.value_buffer(h, fmt, shape, cap_dims, ctypes.byref(ndim),
                                    None, 0)
        data = (ctypes.c_uint8 * int(n))()
        self.table.value_buffer(h, fmt, shape, cap_dims, ctypes.byref(ndim),
                                data, n)
        rank = min(int(ndim.value), cap_dims)
        return Buffer(bytes(data), fmt.raw[:1].decode() or "c",
                      [int(shape[i]) for i in range(rank)])

    def _import_proxy(self, kind, h):
        name, doc = "?", ""
        d = self.describe_value(h)
        if d is not None and d.kind == Kind.OBJECT:
            dd = d._data
            if "name" in dd:
                name = dd["name"].as_(str)
            elif "class" in dd:
                name = dd["class"].as_(str)
            if "doc" in dd:
                doc = dd["doc"].as_(str)
        if kind == Kind.FUNCTION:
            return Value._raw(Kind.FUNCTION, RemoteFunction(self, h, name, doc))
        if kind == Kind.CLASS:
            cd = RemoteClassDef(self, h, name, doc)
            self._classdefs[name] = cd
            return Value._raw(Kind.CLASS, cd)
        # instance: reuse the class proxy when we have seen it
        cd = self._classdefs.get(name)
        if cd is None:
            cd = RemoteClassDef(self, 0, name, doc)
            self._classdefs[name] = cd
        return Value._raw(Kind.INSTANCE, _RemoteRef(self, h),
                          _InstanceMeta(cd, HolderMode.BY_SHARED_OWNER))

    def describe_value(self, h):
        self._check()
        dh = self.table.describe(h)
        if not dh:
            return None
        return self.import_value(dh, owned=True)

    # -- calling into the plugin -------------------------------------

    def member_handle(self, owner_h, name, owner_name="?"):
        self._check()
        mh = self.table.object_get(owner_h, name.encode("utf-8"))
        if not mh:
            raise MemberError(f"{owner_name} has no member {name!r}")
        return mh

    def remote_set(self, owner_h, name, val):
        self._check()
        token = self.host.emit(val)
        try:
            status = self.table.object_set(owner_h, name.encode("utf-8"), token)
        finally:
            self.host.drop(token)
        if status != 0:
            raise MemberError(f"plugin rejected setting member {name!r}")

    def call_handle(self, fn_h, pos, kw):
        self._check()
        tokens = [self.host.emit(v) for v in pos]
        kw_items = list(kw.items())
        kw_tokens = [self.host.emit(v) for _, v in kw_items]
        pos_arr = (HANDLE * len(tokens))(*tokens)
        names_arr = (ctypes.c_char_p * len(kw_items))(
            *[k.encode("utf-8") for k, _ in kw_items])
        kw_arr = (HANDLE * len(kw_tokens))(*kw_tokens)
        res = HANDLE()
        err = HANDLE()
        try:
            status = self.table.call(
                fn_h, len(tokens), pos_arr, len(kw_items), names_arr, kw_arr,
                ctypes.byref(res), ctypes.byref(err))
        finally:
            for tok in tokens:
                self.host.drop(tok)
            for tok in kw_tokens:
                self.host.drop(tok)
        if status == 0:
            return self.import_value(res.value, owned=True)
        e = self.import_value(err.value, owned=True)
        if e.kind == Kind.ERROR:
            raise CallError(f"plugin call failed: {e._data}")
        raise CallError(f"plugin call failed: {e}")


class _HostSide:
    """Our half of the table exchange, scoped to one link.

    Tokens emitted here own one reference to their Value; the plugin
    releases them through value_release.  Argument handles the plugin
    passes to `call` / `object_set` belong to the plugin and are read
    through the plugin's own table.
    """

    def __init__(self, link):
        self.link = link
        self.lock = threading.Lock()
        self.values = {}
        self.next_token = 1
        cb = [
            _T_abi_version(self._abi_version),
            _T_module_root(self._module_root),
            _T_value_kind(self._value_kind),
            _T_value_clone(self._value_clone),
            _T_value_release(self._value_release),
            _T_value_int(self._value_int),
            _T_value_real(self._value_real),
            _T_value_string(self._value_string),
            _T_value_buffer(self._value_buffer),
            _T_array_size(self._array_size),
            _T_array_get(self._array_get),
            _T_object_keys(self._object_keys),
            _T_object_get(self._object_get),
            _T_object_set(self._object_set),
            _T_call(self._call),
            _T_describe(self._describe),
        ]
        self._keepalive = cb
        self.table = EntryTable(*cb)

    def emit(self, v):
        with self.lock:
            tok = self.next_token
            self.next_token += 1
            self.values[tok] = v
        return tok

    def drop(self, tok):
        with self.lock:
            self.values.pop(tok, None)

    def _get(self, tok):
        with self.lock:
            return self.values.get(tok)

    # -- table callbacks; must never raise ---------------------------

    def _abi_version(self):
        return ABI_VERSION

    def _module_root(self):
        return 0  # the host exposes no module to the plugin side

    def _value_kind(self, h):
        v = self._get(h)
        return int(v.kind) if v is not None else -1

    def _value_clone(self, h):
        v = self._get(h)
        return self.emit(v.copy()) if v is not None else 0

    def _value_release(self, h):
        self.drop(h)

    def _value_int(self, h):
        v = self._get(h)
        try:
            if v is not None and v.kind in (Kind.BOOL, Kind.INTEGER):
                return int(v._data)
            if v is not None and v.kind == Kind.REAL:
                return int(v._data)
        except Exception:
            pass
        return 0

    def _value_real(self, h):
        v = self._get(h)
        try:
            if v is not None and v.kind in (Kind.INTEGER, Kind.REAL):
                return float(v._data)
        except Exception:
            pass
        return 0.0

    def _value_string(self, h, buf, cap):
        v = self._get(h)
        if v is None:
            return 0
        if v.kind == Kind.STRING:
            raw = v._data.encode("utf-8")
        elif v.kind == Kind.ERROR:
            raw = str(v._data).encode("utf-8")
        else:
            return 0
        if buf and cap:
            ctypes.memmove(buf, raw, min(len(raw), int(cap)))
        return len(raw)

    def _value_buffer(self, h, fmt, shape, cap_dims, ndim, data, cap):
        v = self._get(h)
        if v is None or v.kind != Kind.BUFFER:
            return 0
        b = v._data
        try:
            if fmt:
                ctypes.memmove(fmt, b.format.encode(), 1)
            if ndim:
                ndim[0] = len(b.shape)
            if shape:
                for i in range(min(len(b.shape), int(cap_dims))):
                    shape[i] = b.shape[i]
            raw = bytes(b.data)
            if data and cap and int(cap) >= len(raw):
                ctypes.memmove(data, raw, len(raw))
            return len(raw)
        except Exception:
            log.exception("value_buffer callback failed")
            return 0

    def _array_size(self, h):
        v = self._get(h)
        if v is not None and v.kind == Kind.ARRAY:
            return len(v._data)
        return 0

    def _array_get(self, h, i):
        v = self._get(h)
        if v is None or v.kind != Kind.ARRAY:
            return 0
        i = int(i)
        if not 0 <= i < len(v._data):
            return 0
        return self.emit(v._data[i])

    def _object_keys(self, h):
        v = self._get(h)
        if v is None or v.kind != Kind.OBJECT:
            return 0
        return self.emit(Value(list(v._data.keys())))

    def _object_get(self, h, key):
        v = self._get(h)
        if v is None:
            return 0
        try:
            name = key.decode("utf-8")
            if v.kind == Kind.OBJECT:
                if name in v._data:
                    return self.emit(v._data[name])
                return 0
            if v.kind in (Kind.INSTANCE, Kind.CLASS):
                return self.emit(v.get(name))
        except Exception:
            return 0
        return 0

    def _object_set(self, h, key, val_h):
        v = self._get(h)
        if v is None:
            return 1
        try:
            name = key.decode("utf-8")
            val = self.link.import_value(val_h, owned=False)
            if v.kind == Kind.OBJECT:
                v[name] = val
                return 0
            if v.kind == Kind.INSTANCE:
                v.set(name, val)
                return 0
        except Exception:
            log.exception("object_set callback failed")
        return 1

    def _call(self, fn_h, n_pos, pos, n_kw, kw_names, kw_vals, out_res, out_err):
        try:
            v = self._get(fn_h)
            if v is None or v.kind not in (Kind.FUNCTION, Kind.CLASS):
                raise CallError("plugin called a non-callable host handle")
            args = [self.link.import_value(pos[i], owned=False)
                    for i in range(int(n_pos))]
            kw = {}
            for i in range(int(n_kw)):
                kw[kw_names[i].decode("utf-8")] = self.link.import_value(
                    kw_vals[i], owned=False)
            out = v(*args, **kw)
            out_res[0] = self.emit(out)
            return 0
        except Exception as e:
            if not isinstance(e, Exception):
                e = Error(str(e))
            out_err[0] = self.emit(Value._raw(Kind.ERROR, e))
            return 1

    def _describe(self, h):
        v = self._get(h)
        if v is None:
            return 0
        try:
            if v.kind == Kind.FUNCTION:
                return self.emit(v._data.describe())
            if v.kind == Kind.CLASS:
                return self.emit(v._data.describe())
            if v.kind == Kind.INSTANCE and v.class_def is not None:
                return self.emit(Value({"class": v.class_def.name}))
        except Exception:
            log.exception("describe callback failed")
        return 0
