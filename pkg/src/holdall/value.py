"""Tagged dynamic value with shared-ownership payloads.

A `Value` holds exactly one of thirteen kinds: Undefined, Null, Bool,
Integer, Real, String, Buffer, Array, Object, Function, Class, Instance
and Error.  Integer is signed 64-bit, Real is IEEE double.  Arrays keep
element order, Objects keep string keys in insertion order.  Copying a
Value never copies the payload: all copies alias one payload, which is
reclaimed when the last copy drops.

Typical use::

    from holdall import Value

    v = Value([1, "two", 3.0])
    v.append({"pi": 3.14159})
    assert v[1].as_(str) == "two"
    assert v[3]["pi"].is_type(float)

    n = Value(1)
    assert n.cast(float) == 1.0      # widening conversion, explicit
    n.as_(float)                     # strict extraction: raises CastError

Host objects of unregistered types are held as Instances with one of four
holder modes (by value, by reference, by unique owner, by shared owner);
see `make_ref`, `make_unique` and `make_shared`, and the `ref_of` /
`unique_of` / `shared_of` type queries for extracting them back out.
"""

import enum
import math
import struct
import warnings

from .errors import (
    CastError,
    DefinitionError,
    LossyConversionWarning,
    OwnershipError,
    RangeError,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class Kind(enum.IntEnum):
    """Payload discriminator.  Numbering is part of the plugin ABI."""

    UNDEFINED = 0
    NULL = 1
    BOOL = 2
    INTEGER = 3
    REAL = 4
    STRING = 5
    BUFFER = 6
    ARRAY = 7
    OBJECT = 8
    FUNCTION = 9
    CLASS = 10
    INSTANCE = 11
    ERROR = 12


class HolderMode(enum.IntEnum):
    """How an Instance payload is owned."""

    BY_VALUE = 0
    BY_REFERENCE = 1
    BY_UNIQUE_OWNER = 2
    BY_SHARED_OWNER = 3


_ELEMENT_SIZE = {
    "b": 1, "B": 1, "h": 2, "H": 2, "i": 4, "I": 4,
    "q": 8, "Q": 8, "f": 4, "d": 8, "c": 1,
}


class Buffer:
    """Dense N-dimensional block of scalar elements.

    `format` is a single struct-style code (b B h H i I q Q f d c) and
    `shape` a tuple of non-negative extents.  The byte length always
    equals product(shape) times the element size.  Content is mutable
    through `data` (a bytearray); length and shape are not.
    """

    __slots__ = ("data", "format", "shape")

    def __init__(self, data=None, format="c", shape=None):
        if format not in _ELEMENT_SIZE:
            raise DefinitionError(f"unknown buffer format {format!r}")
        if data is None:
            data = b""
        if isinstance(data, memoryview):
            data = data.tobytes()
        self.data = bytearray(data)
        self.format = format
        esize = _ELEMENT_SIZE[format]
        if shape is None:
            if len(self.data) % esize:
                raise DefinitionError(
                    f"byte length {len(self.data)} not a multiple of element size {esize}")
            shape = (len(self.data) // esize,)
        self.shape = tuple(int(n) for n in shape)
        if any(n < 0 for n in self.shape):
            raise DefinitionError("negative extent in buffer shape")
        if math.prod(self.shape) * esize != len(self.data):
            raise DefinitionError(
                f"shape {self.shape} x element size {esize} != {len(self.data)} bytes")

    @classmethod
    def pack(cls, values, format, shape=None):
        """Build a buffer from an iterable of scalars."""
        values = list(values)
        raw = struct.pack(f"<{len(values)}{format}", *values)
        return cls(raw, format, shape)

    def unpack(self):
        """Flat list of the scalar elements."""
        n = len(self.data) // self.element_size
        return list(struct.unpack(f"<{n}{self.format}", bytes(self.data)))

    @property
    def element_size(self):
        return _ELEMENT_SIZE[self.format]

    @property
    def nbytes(self):
        return len(self.data)

    def tobytes(self):
        return bytes(self.data)

    def clone(self):
        """Byte-identical, independently owned copy."""
        return Buffer(bytes(self.data), self.format, self.shape)

    def __len__(self):
        return self.shape[0] if self.shape else 1

    def __eq__(self, other):
        if not isinstance(other, Buffer):
            return NotImplemented
        return (self.format == other.format and self.shape == other.shape
                and self.data == other.data)

    def __repr__(self):
        return f"Buffer(format={self.format!r}, shape={self.shape}, nbytes={self.nbytes})"


class _TypeQuery:
    # marker produced by ref_of / shared_of / unique_of
    __slots__ = ("cls", "form")

    def __init__(self, cls, form):
        self.cls = cls
        self.form = form

    def __repr__(self):
        return f"{self.form}_of({self.cls.__name__})"


def ref_of(cls):
    """Type query matching an Instance of `cls` held by reference."""
    return _TypeQuery(cls, "ref")


def shared_of(cls):
    """Type query matching an Instance of `cls` held by shared owner."""
    return _TypeQuery(cls, "shared")


def unique_of(cls):
    """Type query matching an Instance of `cls` held by unique owner.

    Strict extraction through this query transfers ownership out: the
    value is left holding the object by reference and a second transfer
    raises OwnershipError.
    """
    return _TypeQuery(cls, "unique")


class _InstanceMeta:
    # shared by every copy of an Instance value, so an ownership
    # transfer through one copy is visible through all of them
    __slots__ = ("class_def", "mode", "moved")

    def __init__(self, class_def, mode):
        self.class_def = class_def
        self.mode = mode
        self.moved = False


# wired up by the functions / classes modules at import time; value.py
# stays free of upward imports
_hooks = {
    "wrap_callable": None,    # plain callable -> FunctionDef
    "classdef_for": None,     # host type -> ClassDef (auto-registering)
    "invoke": None,           # (FunctionDef, [Value], {str: Value}) -> Value
    "instantiate": None,      # (ClassDef, [Value], {str: Value}) -> Value
    "instance_call": None,    # (Value, name, [Value], {str: Value}) -> Value
    "attr_get": None,
    "attr_set": None,
    "op_dispatch": None,      # (op, Value, *operand Values) -> Value
    "is_function_def": None,
    "is_class_def": None,
}

_UNSET = object()


class Value:
    """The dynamic value.  See the module docstring."""

    __slots__ = ("_kind", "_data", "_inst")

    def __init__(self, x=_UNSET):
        if x is _UNSET:
            self._kind = Kind.UNDEFINED
            self._data = None
            self._inst = None
            return
        # exact-type fast lane for the hot scalar cases
        k = _FAST_KIND.get(type(x))
        if k is not None and (k != Kind.INTEGER
                              or INT64_MIN <= x <= INT64_MAX):
            self._kind = k
            self._data = x
            self._inst = None
            return
        k, d, i = _make_parts(x)
        self._kind = k
        self._data = d
        self._inst = i

    # -- construction ------------------------------------------------

    @classmethod
    def _raw(cls, kind, data, inst=None):
        v = cls.__new__(cls)
        v._kind = kind
        v._data = data
        v._inst = inst
        return v

    def copy(self):
        """New Value aliasing the same payload."""
        return Value._raw(self._kind, self._data, self._inst)

    # -- inspection --------------------------------------------------

    @property
    def kind(self):
        return self._kind

    @property
    def class_def(self):
        """ClassDef of an Instance value, else None."""
        return self._inst.class_def if self._inst is not None else None

    @property
    def holder_mode(self):
        return self._inst.mode if self._inst is not None else None

    def is_undefined(self):
        return self._kind == Kind.UNDEFINED

    def is_null(self):
        return self._kind == Kind.NULL

    def is_type(self, t):
        """True when strict extraction through `t` would succeed.

        `t` is a Python type (bool, int, float, str, bytes, list, dict,
        Buffer, None for Null), a registered or plain host class, the
        generic `Value`, or a ref_of / shared_of / unique_of query.
        """
        k = self._kind
        if t is Value:
            return True
        if isinstance(t, _TypeQuery):
            if k != Kind.INSTANCE or not self._is_exact_class(t.cls):
                return False
            mode = self._inst.mode
            if t.form == "ref":
                return mode == HolderMode.BY_REFERENCE
            if t.form == "shared":
                return mode == HolderMode.BY_SHARED_OWNER
            return mode == HolderMode.BY_UNIQUE_OWNER and not self._inst.moved
        if t is None or t is type(None):
            return k == Kind.NULL
        if t is bool:
            return k == Kind.BOOL
        if t is int:
            return k == Kind.INTEGER
        if t is float:
            return k == Kind.REAL
        if t is str:
            return k == Kind.STRING
        if t is Buffer or t is bytes or t is bytearray:
            return k == Kind.BUFFER
        if t is list or t is tuple:
            return k == Kind.ARRAY
        if t is dict:
            return k == Kind.OBJECT
        if isinstance(t, type):
            if k == Kind.INSTANCE:
                return self._is_exact_class(t)
            if k == Kind.ERROR:
                return type(self._data) is t
            return False
        return False

    def _is_exact_class(self, t):
        cd = self._inst.class_def
        if cd is not None and cd.host_type is not None:
            return cd.host_type is t
        return type(self._data) is t

    # -- extraction --------------------------------------------------

    def as_(self, t):
        """Strict extraction: kind and form must match exactly."""
        k = self._kind
        if t is Value:
            return self
        if isinstance(t, _TypeQuery):
            return self._extract_form(t)
        if t is None or t is type(None):
            if k == Kind.NULL:
                return None
        elif t is bool:
            if k == Kind.BOOL:
                return self._data
        elif t is int:
            if k == Kind.INTEGER:
                return self._data
        elif t is float:
            if k == Kind.REAL:
                return self._data
        elif t is str:
            if k == Kind.STRING:
                return self._data
        elif t is Buffer:
            if k == Kind.BUFFER:
                return self._data
        elif t is bytes or t is bytearray:
            if k == Kind.BUFFER:
                return t(self._data.data)
        elif t is list:
            if k == Kind.ARRAY:
                return self._data
        elif t is tuple:
            if k == Kind.ARRAY:
                return tuple(self._data)
        elif t is dict:
            if k == Kind.OBJECT:
                return self._data
        elif isinstance(t, type):
            if k == Kind.INSTANCE and self._is_exact_class(t):
                return self._data
            if k == Kind.ERROR and type(self._data) is t:
                return self._data
        raise CastError(
            f"cannot extract {k.name} value as {_tname(t)} (strict)")

    def _extract_form(self, q):
        if self._kind != Kind.INSTANCE or not self._is_exact_class(q.cls):
            raise CastError(
                f"cannot extract {self._kind.name} value as {q!r} (strict)")
        meta = self._inst
        if q.form == "ref":
            if meta.mode != HolderMode.BY_REFERENCE:
                raise CastError(
                    f"value holds {q.cls.__name__} {meta.mode.name}, not BY_REFERENCE")
            return self._data
        if q.form == "shared":
            if meta.mode != HolderMode.BY_SHARED_OWNER:
                raise CastError(
                    f"value holds {q.cls.__name__} {meta.mode.name}, not BY_SHARED_OWNER")
            return self._data
        # unique: transfer ownership out
        if meta.mode == HolderMode.BY_UNIQUE_OWNER:
            meta.mode = HolderMode.BY_REFERENCE
            meta.moved = True
            return self._data
        if meta.moved:
            raise OwnershipError(
                f"unique ownership of {q.cls.__name__} was already transferred")
        raise CastError(
            f"value holds {q.cls.__name__} {meta.mode.name}, not BY_UNIQUE_OWNER")

    def cast(self, t):
        """Converting extraction along the documented lattice.

        Integer widens to float, Real truncates toward zero to int (range
        checked), an Instance converts to any registered ancestor class
        and from owning modes to the plain or reference form.  Everything
        else is strict.
        """
        try:
            return self.as_(t)
        except OwnershipError:
            raise
        except CastError:
            pass
        k = self._kind
        if t is float and k == Kind.INTEGER:
            return float(self._data)
        if t is int and k == Kind.REAL:
            r = self._data
            if math.isnan(r) or math.isinf(r):
                raise CastError(f"cannot convert {r!r} to Integer")
            n = int(r)  # truncates toward zero
            if not INT64_MIN <= n <= INT64_MAX:
                raise CastError(f"{r!r} does not fit a signed 64-bit integer")
            return n
        if k == Kind.INSTANCE:
            if isinstance(t, _TypeQuery):
                if t.form == "ref" and self._is_exact_class(t.cls):
                    # owning modes expose a reference view at cost 1
                    return self._data
                raise CastError(
                    f"no conversion from {self._describe_form()} to {t!r}")
            if isinstance(t, type) and isinstance(self._data, t):
                return self._data
        raise CastError(
            f"no conversion from {k.name} to {_tname(t)}")

    def _describe_form(self):
        return f"{self._inst.class_def.name} {self._inst.mode.name}"

    def to_python(self):
        """Recursive conversion to plain Python objects.

        Scalars map to their obvious counterparts, Buffer to bytes,
        Array to list, Object to dict.  Function, Class and Instance
        payloads are returned as-is.
        """
        k = self._kind
        if k in (Kind.UNDEFINED, Kind.NULL):
            return None
        if k in (Kind.BOOL, Kind.INTEGER, Kind.REAL, Kind.STRING):
            return self._data
        if k == Kind.BUFFER:
            return bytes(self._data.data)
        if k == Kind.ARRAY:
            return [e.to_python() for e in self._data]
        if k == Kind.OBJECT:
            return {key: e.to_python() for key, e in self._data.items()}
        return self._data

    # -- containers --------------------------------------------------

    def __len__(self):
        k = self._kind
        if k in (Kind.ARRAY, Kind.OBJECT, Kind.BUFFER, Kind.STRING):
            return len(self._data)
        raise CastError(f"{k.name} value has no length")

    def __getitem__(self, key):
        k = self._kind
        if k == Kind.ARRAY:
            if isinstance(key, Value):
                key = key.cast(int)
            if not isinstance(key, int) or isinstance(key, bool):
                raise CastError("array index must be an integer")
            if not -len(self._data) <= key < len(self._data):
                raise RangeError(
                    f"index {key} out of range for array of {len(self._data)}")
            return self._data[key]
        if k == Kind.OBJECT:
            if isinstance(key, Value):
                key = key.as_(str)
            if key not in self._data:
                raise RangeError(f"object has no key {key!r}")
            return self._data[key]
        if k == Kind.INSTANCE:
            return _hooks["op_dispatch"]("__getitem__", self, Value(key))
        raise CastError(f"{k.name} value is not indexable")

    def __setitem__(self, key, val):
        k = self._kind
        if k == Kind.ARRAY:
            if not isinstance(key, int) or isinstance(key, bool):
                raise CastError("array index must be an integer")
            if not -len(self._data) <= key < len(self._data):
                raise RangeError(
                    f"index {key} out of range for array of {len(self._data)}")
            self._data[key] = Value(val)
            return
        if k == Kind.OBJECT:
            if not isinstance(key, str):
                raise CastError("object keys must be strings")
            self._data[key] = Value(val)
            return
        if k == Kind.INSTANCE:
            _hooks["op_dispatch"]("__setitem__", self, Value(key), Value(val))
            return
        raise CastError(f"{k.name} value does not support item assignment")

    def append(self, val):
        if self._kind != Kind.ARRAY:
            raise CastError(f"cannot append to {self._kind.name} value")
        self._data.append(Value(val))

    def __contains__(self, key):
        if self._kind == Kind.OBJECT:
            return key in self._data
        if self._kind == Kind.ARRAY:
            probe = Value(key)
            return any(e == probe for e in self._data)
        raise CastError(f"{self._kind.name} value has no membership test")

    def __iter__(self):
        """Arrays yield element Values, Objects yield (key, Value) pairs."""
        k = self._kind
        if k == Kind.ARRAY:
            return iter(list(self._data))
        if k == Kind.OBJECT:
            return iter(list(self._data.items()))
        raise CastError(f"{k.name} value is not iterable")

    def keys(self):
        if self._kind != Kind.OBJECT:
            raise CastError(f"{self._kind.name} value has no keys")
        return list(self._data.keys())

    def values(self):
        if self._kind != Kind.OBJECT:
            raise CastError(f"{self._kind.name} value has no values view")
        return list(self._data.values())

    def items(self):
        if self._kind != Kind.OBJECT:
            raise CastError(f"{self._kind.name} value has no items view")
        return list(self._data.items())

    # -- calls and attributes ----------------------------------------

    def __call__(self, *args, **kw):
        k = self._kind
        pos = [a if isinstance(a, Value) else Value(a) for a in args]
        kwargs = {n: (a if isinstance(a, Value) else Value(a)) for n, a in kw.items()}
        if k == Kind.FUNCTION:
            return _hooks["invoke"](self._data, pos, kwargs)
        if k == Kind.CLASS:
            return _hooks["instantiate"](self._data, pos, kwargs)
        raise CastError(f"{k.name} value is not callable")

    def call(self, name, *args, **kw):
        """Invoke a named method of an Instance (or static of a Class)."""
        pos = [a if isinstance(a, Value) else Value(a) for a in args]
        kwargs = {n: (a if isinstance(a, Value) else Value(a)) for n, a in kw.items()}
        return _hooks["instance_call"](self, name, pos, kwargs)

    def get(self, name):
        """Read a property or state attribute of an Instance or Class."""
        return _hooks["attr_get"](self, name)

    def set(self, name, val):
        """Write a property or state attribute of an Instance."""
        _hooks["attr_set"](self, name, val if isinstance(val, Value) else Value(val))

    # -- copying -----------------------------------------------------

    def clone(self, depth=-1):
        """Independent copy.

        Arrays and Objects are copied recursively to `depth` levels
        (negative means unbounded); below that, elements are shared as
        plain copies.  Buffers are copied bytewise.  Function, Class and
        Instance payloads are always shared.
        """
        k = self._kind
        if depth == 0:
            return self.copy()
        if k == Kind.ARRAY:
            return Value._raw(k, [e.clone(depth - 1) for e in self._data])
        if k == Kind.OBJECT:
            return Value._raw(k, {key: e.clone(depth - 1) for key, e in self._data.items()})
        if k == Kind.BUFFER:
            return Value._raw(k, self._data.clone())
        return self.copy()

    # -- comparison --------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Value):
            other = Value(other)
        return _equals(self, other)

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __lt__(self, other):
        if not isinstance(other, Value):
            other = Value(other)
        a, b = self._kind, other._kind
        num = (Kind.INTEGER, Kind.REAL)
        if a in num and b in num:
            return self._data < other._data
        if a == Kind.STRING and b == Kind.STRING:
            return self._data < other._data
        if a == Kind.INSTANCE:
            return _truthy(_hooks["op_dispatch"]("__lt__", self, other))
        raise CastError(f"no ordering between {a.name} and {b.name}")

    # -- arithmetic (Instance operator protocol) ---------------------

    def _binop(self, op, other):
        if self._kind != Kind.INSTANCE:
            raise CastError(f"{self._kind.name} value does not define {op}")
        rhs = other if isinstance(other, Value) else Value(other)
        return _hooks["op_dispatch"](op, self, rhs)

    def __add__(self, other):
        return self._binop("__add__", other)

    def __sub__(self, other):
        return self._binop("__sub__", other)

    def __mul__(self, other):
        return self._binop("__mul__", other)

    def __truediv__(self, other):
        return self._binop("__div__", other)

    def __neg__(self):
        if self._kind in (Kind.INTEGER, Kind.REAL):
            return Value(-self._data)
        if self._kind == Kind.INSTANCE:
            return _hooks["op_dispatch"]("__neg__", self)
        raise CastError(f"{self._kind.name} value does not define __neg__")

    # -- rendering ---------------------------------------------------

    def dump_json(self, indent=None):
        from . import codec
        return codec.dump_json(self, indent=indent)

    def dump_cbor(self):
        from . import cbor
        return cbor.dump_cbor(self)

    def __str__(self):
        k = self._kind
        if k == Kind.UNDEFINED:
            return "undefined"
        if k == Kind.NULL:
            return "null"
        if k == Kind.BOOL:
            return "true" if self._data else "false"
        if k == Kind.INTEGER:
            return str(self._data)
        if k == Kind.REAL:
            return repr(self._data)
        if k == Kind.STRING:
            return self._data
        if k in (Kind.ARRAY, Kind.OBJECT):
            return self.dump_json()
        if k == Kind.BUFFER:
            b = self._data
            return f"<buffer {b.format}{list(b.shape)} {b.nbytes} bytes>"
        if k == Kind.FUNCTION:
            return f"<function {getattr(self._data, 'name', '?')}>"
        if k == Kind.CLASS:
            return f"<class {getattr(self._data, 'name', '?')}>"
        if k == Kind.INSTANCE:
            return _hooks["op_dispatch"]("__str__", self).as_(str)
        return f"<error {type(self._data).__name__}: {self._data}>"

    def __repr__(self):
        s = str(self)
        if len(s) > 60:
            s = s[:57] + "..."
        return f"<Value {self._kind.name} {s}>"

    def __bool__(self):
        k = self._kind
        if k in (Kind.UNDEFINED, Kind.NULL):
            return False
        if k == Kind.BOOL:
            return self._data
        if k in (Kind.INTEGER, Kind.REAL):
            return bool(self._data)
        if k in (Kind.STRING, Kind.ARRAY, Kind.OBJECT, Kind.BUFFER):
            return len(self._data) > 0
        return True


def _truthy(v):
    return bool(v) if isinstance(v, Value) else bool(v)


def _equals(a, b):
    ka, kb = a._kind, b._kind
    num = (Kind.INTEGER, Kind.REAL)
    if ka in num and kb in num:
        if ka == kb == Kind.INTEGER:
            return a._data == b._data
        return float(a._data) == float(b._data)
    if ka != kb:
        return False
    if ka in (Kind.UNDEFINED, Kind.NULL):
        return True
    if ka in (Kind.BOOL, Kind.STRING):
        return a._data == b._data
    if ka == Kind.BUFFER:
        return a._data == b._data
    if ka == Kind.ARRAY:
        if len(a._data) != len(b._data):
            return False
        return all(_equals(x, y) for x, y in zip(a._data, b._data))
    if ka == Kind.OBJECT:
        if a._data.keys() != b._data.keys():
            return False
        return all(_equals(v, b._data[key]) for key, v in a._data.items())
    if ka == Kind.INSTANCE:
        dispatch = _hooks["op_dispatch"]
        if dispatch is not None:
            return _truthy(dispatch("__eq__", a, b))
        return a._data is b._data
    # Function, Class, Error: payload identity
    return a._data is b._data


def equals_exact(a, b):
    """Kind-strict structural equality (no Integer/Real promotion)."""
    if a._kind != b._kind:
        return False
    if a._kind == Kind.REAL:
        x, y = a._data, b._data
        if math.isnan(x) and math.isnan(y):
            return True
        return x == y and math.copysign(1, x) == math.copysign(1, y)
    if a._kind == Kind.ARRAY:
        return len(a._data) == len(b._data) and all(
            equals_exact(x, y) for x, y in zip(a._data, b._data))
    if a._kind == Kind.OBJECT:
        return list(a._data.keys()) == list(b._data.keys()) and all(
            equals_exact(v, b._data[key]) for key, v in a._data.items())
    return _equals(a, b)


# exact-type dispatch used by Value.__init__ before the isinstance chain;
# int entries still take the range check there
_FAST_KIND = {
    bool: Kind.BOOL,
    int: Kind.INTEGER,
    float: Kind.REAL,
    str: Kind.STRING,
    type(None): Kind.NULL,
}


def _make_parts(x):
    # single authority over host-object -> (kind, payload, meta)
    if isinstance(x, Value):
        return x._kind, x._data, x._inst
    if x is None:
        return Kind.NULL, None, None
    if isinstance(x, bool):
        return Kind.BOOL, x, None
    if isinstance(x, int):
        if INT64_MIN <= x <= INT64_MAX:
            return Kind.INTEGER, x, None
        warnings.warn(
            f"integer {x} exceeds 64-bit range, degrading to Real",
            LossyConversionWarning, stacklevel=3)
        try:
            return Kind.REAL, float(x), None
        except OverflowError:
            return Kind.REAL, math.inf if x > 0 else -math.inf, None
    if isinstance(x, float):
        return Kind.REAL, x, None
    if isinstance(x, str):
        return Kind.STRING, x, None
    if isinstance(x, Buffer):
        return Kind.BUFFER, x, None
    if isinstance(x, (bytes, bytearray, memoryview)):
        return Kind.BUFFER, Buffer(x), None
    if isinstance(x, (list, tuple)):
        return Kind.ARRAY, [e if isinstance(e, Value) else Value(e) for e in x], None
    if isinstance(x, dict):
        data = {}
        for key, e in x.items():
            if not isinstance(key, str):
                raise CastError(
                    f"object keys must be strings, got {type(key).__name__}")
            data[key] = e if isinstance(e, Value) else Value(e)
        return Kind.OBJECT, data, None
    if isinstance(x, BaseException):
        return Kind.ERROR, x, None
    if _hooks["is_function_def"] is not None and _hooks["is_function_def"](x):
        return Kind.FUNCTION, x, None
    if _hooks["is_class_def"] is not None and _hooks["is_class_def"](x):
        return Kind.CLASS, x, None
    if isinstance(x, type):
        cd = _hooks["classdef_for"](x)
        return Kind.CLASS, cd, None
    if callable(x):
        fd = _hooks["wrap_callable"](x)
        return Kind.FUNCTION, fd, None
    # any other host object: hold as an Instance by value
    cd = _hooks["classdef_for"](type(x))
    return Kind.INSTANCE, x, _InstanceMeta(cd, HolderMode.BY_VALUE)


def make(x=_UNSET):
    """Alias for the Value constructor."""
    return Value(x)


def _make_instance(obj, mode):
    if isinstance(obj, (Value, type)) or obj is None:
        raise CastError(f"cannot hold {type(obj).__name__} by {mode.name}")
    cd = _hooks["classdef_for"](type(obj))
    return Value._raw(Kind.INSTANCE, obj, _InstanceMeta(cd, mode))


def make_ref(obj):
    """Hold a host object by reference (caller keeps ownership)."""
    return _make_instance(obj, HolderMode.BY_REFERENCE)


def make_unique(obj):
    """Hold a host object as its unique owner."""
    return _make_instance(obj, HolderMode.BY_UNIQUE_OWNER)


def make_shared(obj):
    """Hold a host object as a shared owner."""
    return _make_instance(obj, HolderMode.BY_SHARED_OWNER)


def _tname(t):
    if isinstance(t, _TypeQuery):
        return repr(t)
    if t is None:
        return "NoneType"
    return getattr(t, "__name__", repr(t))
