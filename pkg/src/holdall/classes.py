"""Class registry: reflected host classes and dynamic classes.

`register_class` opens a fluent builder over a real host class;
`dynamic_class` builds a class that exists only in the registry, whose
instances keep their state in a plain attribute map.  Both support
constructors, methods, statics, properties, single inheritance and a
closed set of operator hooks:

    __init__ __str__ __eq__ __lt__ __add__ __sub__ __mul__ __div__
    __neg__ __getitem__ __setitem__ __buffer__

Registrations live in one process-wide table.  Re-registering a name
replaces the previous definition and logs a warning.  Host objects of
never-registered types are usable too: the first time one is wrapped,
a stub definition (name, no members) is auto-registered for its type.
"""

import logging
import threading

from .errors import CallError, CastError, DefinitionError, MemberError
from .functions import BoundFunction, FunctionDef, wrap
from .value import HolderMode, Kind, Value, _InstanceMeta

log = logging.getLogger(__name__)

OPERATORS = frozenset({
    "__init__", "__str__", "__eq__", "__lt__", "__add__", "__sub__",
    "__mul__", "__div__", "__neg__", "__getitem__", "__setitem__",
    "__buffer__",
})


class Property:
    __slots__ = ("name", "fget", "fset")

    def __init__(self, name, fget, fset=None):
        self.name = name
        self.fget = fget
        self.fset = fset


class ClassDef:
    """One entry of the class registry."""

    __slots__ = ("name", "doc", "host_type", "parent", "constructors",
                 "methods", "statics", "properties", "operators",
                 "dynamic", "buffer_nbytes")

    def __init__(self, name, host_type=None, doc=""):
        self.name = name
        self.doc = doc or ""
        self.host_type = host_type
        self.parent = None
        self.constructors = FunctionDef("__init__")
        self.methods = {}
        self.statics = {}
        self.properties = {}
        self.operators = {}
        self.dynamic = host_type is None
        self.buffer_nbytes = None

    # -- lookup ------------------------------------------------------

    def chain(self):
        cd = self
        while cd is not None:
            yield cd
            cd = cd.parent

    def lookup_method(self, name):
        for cd in self.chain():
            if name in cd.methods:
                return cd.methods[name]
            if name in cd.operators:
                return cd.operators[name]
        return None

    def lookup_static(self, name):
        for cd in self.chain():
            if name in cd.statics:
                return cd.statics[name]
        return None

    def lookup_property(self, name):
        for cd in self.chain():
            if name in cd.properties:
                return cd.properties[name]
        return None

    # -- runtime behavior (overridden by plugin proxies) -------------

    def instantiate(self, pos, kw):
        """Construct an instance from already-wrapped arguments."""
        if self.dynamic:
            inst = Value._raw(Kind.INSTANCE, {},
                              _InstanceMeta(self, HolderMode.BY_VALUE))
            ctor = None
            for cd in self.chain():
                if cd.constructors.overloads:
                    ctor = cd.constructors
                    break
            if ctor is not None:
                ctor.invoke([inst] + list(pos), kw)
            elif pos or kw:
                raise CallError(f"{self.name} defines no __init__ but got arguments")
            return inst
        if not self.constructors.overloads:
            raise CallError(f"class {self.name} has no constructor")
        return self.constructors.invoke(pos, kw)

    def call_member(self, v, name, pos, kw):
        fd = self.lookup_method(name)
        if fd is not None:
            return fd.invoke([v] + list(pos), kw)
        fd = self.lookup_static(name)
        if fd is not None:
            return fd.invoke(pos, kw)
        raise MemberError(f"{self.name} has no method {name!r}")

    def call_static_member(self, name, pos, kw):
        fd = self.lookup_static(name) or self.lookup_method(name)
        if fd is not None:
            return fd.invoke(pos, kw)
        raise MemberError(f"{self.name} has no static {name!r}")

    def member_get(self, v, name):
        prop = self.lookup_property(name)
        if prop is not None:
            return _wrap(prop.fget(v._data))
        if self.dynamic:
            if name in v._data:
                return v._data[name]
            raise MemberError(f"{self.name} instance has no attribute {name!r}")
        fd = self.lookup_method(name)
        if fd is not None and not name.startswith("__"):
            return Value._raw(Kind.FUNCTION, BoundFunction(fd, v))
        fd = self.lookup_static(name)
        if fd is not None:
            return Value._raw(Kind.FUNCTION, fd)
        raise MemberError(f"{self.name} has no attribute {name!r}")

    def member_set(self, v, name, val):
        prop = self.lookup_property(name)
        if prop is not None:
            if prop.fset is None:
                raise MemberError(f"{self.name}.{name} is read-only")
            prop.fset(v._data, _materialize(val))
            return
        if self.dynamic:
            v._data[name] = val
            return
        raise MemberError(f"{self.name} has no writable attribute {name!r}")

    def static_get(self, name):
        fd = self.lookup_static(name)
        if fd is None:
            fd = self.lookup_method(name)
        if fd is not None:
            return Value._raw(Kind.FUNCTION, fd)
        raise MemberError(f"{self.name} has no attribute {name!r}")

    def describe(self):
        d = {
            "name": self.name,
            "doc": self.doc,
            "dynamic": self.dynamic,
        }
        if self.parent is not None:
            d["parent"] = self.parent.name
        if self.constructors.overloads:
            d["construct"] = self.constructors.describe()["overloads"]
        if self.methods:
            d["methods"] = {n: fd.describe() for n, fd in sorted(self.methods.items())}
        if self.statics:
            d["statics"] = {n: fd.describe() for n, fd in sorted(self.statics.items())}
        if self.properties:
            d["properties"] = [
                {"name": n, "writable": p.fset is not None}
                for n, p in sorted(self.properties.items())]
        if self.operators:
            d["operators"] = sorted(self.operators)
        return Value(d)

    def __repr__(self):
        tag = "dynamic" if self.dynamic else getattr(self.host_type, "__name__", "?")
        return f"<ClassDef {self.name} ({tag})>"


_LOCK = threading.RLock()
_BY_NAME = {}
_BY_TYPE = {}


def register_class(host_type, name=None, doc=""):
    """Open a builder over a host class.  Replaces any previous
    registration under the same name (with a warning)."""
    if not isinstance(host_type, type):
        raise DefinitionError(f"expected a class, got {type(host_type).__name__}")
    cd = ClassDef(name or host_type.__name__, host_type, doc)
    _register(cd)
    return ClassBuilder(cd)


def dynamic_class(name, doc=""):
    """Open a builder for a class with no host type behind it."""
    cd = ClassDef(name, None, doc)
    _register(cd)
    return ClassBuilder(cd)


def _register(cd):
    with _LOCK:
        if cd.name in _BY_NAME:
            log.warning("class %r re-registered; previous definition replaced",
                        cd.name)
        _BY_NAME[cd.name] = cd
        if cd.host_type is not None:
            _BY_TYPE[cd.host_type] = cd


def find_class(name):
    """Registered ClassDef under `name`, or None."""
    with _LOCK:
        return _BY_NAME.get(name)


def classdef_for(host_type):
    """ClassDef for a host type, auto-registering a stub if needed."""
    with _LOCK:
        cd = _BY_TYPE.get(host_type)
        if cd is not None:
            return cd
        cd = ClassDef(host_type.__name__, host_type,
                      doc=f"auto-registered stub for {host_type.__name__}")
        _BY_TYPE[host_type] = cd
        # stubs must not displace an explicit registration by name
        _BY_NAME.setdefault(cd.name, cd)
        return cd


class ClassBuilder:
    """Fluent surface over a ClassDef.  Every method returns self."""

    def __init__(self, cd):
        self.cd = cd

    def construct(self, *specs):
        """Add a constructor overload built from the host class itself."""
        cd = self.cd
        if cd.dynamic:
            raise DefinitionError(
                f"dynamic class {cd.name} takes constructors via def_('__init__', fn)")
        fd = wrap(cd.host_type, *specs, name="__init__")
        cd.constructors.add(fd.overloads[0])
        return self

    def def_(self, name, fn, *specs):
        """Add a method overload; dunder names hit the operator table."""
        cd = self.cd
        if name.startswith("__"):
            if name not in OPERATORS:
                raise DefinitionError(
                    f"{name} is not an overloadable operator; allowed: "
                    + " ".join(sorted(OPERATORS)))
            if name == "__init__":
                # host classes take factories; dynamic classes take an
                # initializer whose first parameter is the instance
                self_type = Value if cd.dynamic else None
                fd = wrap(fn, *specs, name=name, self_type=self_type)
                cd.constructors.add(fd.overloads[0])
                return self
            target = cd.operators
        else:
            target = cd.methods
        fd = wrap(fn, *specs, name=name,
                  self_type=cd.host_type if not cd.dynamic else Value)
        fd.is_method = True
        if name in target:
            target[name].add(fd.overloads[0])
        else:
            target[name] = fd
        return self

    def def_static(self, name, fn, *specs):
        cd = self.cd
        fd = wrap(fn, *specs, name=name)
        if name in cd.statics:
            cd.statics[name].add(fd.overloads[0])
        else:
            cd.statics[name] = fd
        return self

    def def_readonly(self, name, attr=None, fget=None):
        """Expose a read-only property backed by a host attribute or getter."""
        self._property(name, attr, fget, writable=False)
        return self

    def def_readwrite(self, name, attr=None, fget=None, fset=None):
        self._property(name, attr, fget, fset=fset, writable=True)
        return self

    def _property(self, name, attr, fget, fset=None, writable=False):
        cd = self.cd
        if cd.dynamic:
            raise DefinitionError(
                f"dynamic class {cd.name} exposes state directly; "
                "properties are for host classes")
        a = attr or name
        if fget is None:
            def fget(obj, _a=a):
                return getattr(obj, _a)
        if writable and fset is None:
            def fset(obj, val, _a=a):
                setattr(obj, _a, val)
        cd.properties[name] = Property(name, fget, fset if writable else None)

    def inherit(self, parent):
        cd = self.cd
        if cd.parent is not None:
            raise DefinitionError(
                f"{cd.name} already inherits {cd.parent.name}; single inheritance only")
        pd = _resolve_classdef(parent)
        if pd is None:
            raise DefinitionError(f"unknown parent class {parent!r}")
        if pd is cd:
            raise DefinitionError(f"{cd.name} cannot inherit itself")
        cd.parent = pd
        return self

    def expect_buffer_bytes(self, n):
        """Declare the byte length the buffer constructor accepts."""
        self.cd.buffer_nbytes = int(n)
        return self

    @property
    def value(self):
        """The Class value for this definition."""
        return Value._raw(Kind.CLASS, self.cd)

    def __repr__(self):
        return f"<ClassBuilder {self.cd.name}>"


def _resolve_classdef(parent):
    if isinstance(parent, ClassDef):
        return parent
    if isinstance(parent, ClassBuilder):
        return parent.cd
    if isinstance(parent, str):
        return find_class(parent)
    if isinstance(parent, type):
        with _LOCK:
            return _BY_TYPE.get(parent)
    return None


# -- kind-level dispatch, wired into Value ---------------------------

def instantiate(cd, pos, kw):
    return cd.instantiate(pos, kw)


def instance_call(v, name, pos, kw):
    if v.kind == Kind.INSTANCE:
        return v.class_def.call_member(v, name, pos, kw)
    if v.kind == Kind.CLASS:
        return v._data.call_static_member(name, pos, kw)
    raise CastError(f"{v.kind.name} value has no methods")


def attr_get(v, name):
    if v.kind == Kind.INSTANCE:
        return v.class_def.member_get(v, name)
    if v.kind == Kind.CLASS:
        return v._data.static_get(name)
    raise CastError(f"{v.kind.name} value has no attributes")


def attr_set(v, name, val):
    if v.kind != Kind.INSTANCE:
        raise CastError(f"{v.kind.name} value has no settable attributes")
    v.class_def.member_set(v, name, val)


def op_dispatch(op, target, *operands):
    cd = target.class_def
    fd = None
    if cd is not None:
        for c in cd.chain():
            if op in c.operators:
                fd = c.operators[op]
                break
    if fd is not None:
        if op == "__eq__":
            try:
                return fd.invoke([target, *operands], {})
            except CallError:
                return Value(False)  # operand kind has no conversion
        return fd.invoke([target, *operands], {})
    # fallbacks every instance gets
    if op == "__eq__":
        other = operands[0]
        if other.kind != Kind.INSTANCE:
            return Value(False)
        return Value(target._data is other._data)
    if op == "__str__":
        name = cd.name if cd is not None else type(target._data).__name__
        return Value(f"{name}@{id(target._data):#x}")
    name = cd.name if cd is not None else type(target._data).__name__
    raise CastError(f"{name} does not define {op}")


def buffer_of(v):
    """Run the __buffer__ hook of an Instance; returns a Buffer."""
    cd = v.class_def
    fd = cd.lookup_method("__buffer__") if cd is not None else None
    if fd is None:
        raise CastError(f"{cd.name if cd else '?'} does not define __buffer__")
    out = fd.invoke([v], {})
    if out.kind != Kind.BUFFER:
        raise CastError(f"__buffer__ of {cd.name} returned {out.kind.name}, not Buffer")
    return out._data


def construct_from_buffer(cd, buffer):
    """Rebuild an instance from raw bytes via its buffer constructor."""
    if cd.buffer_nbytes is not None and buffer.nbytes != cd.buffer_nbytes:
        raise CastError(
            f"{cd.name} expects a {cd.buffer_nbytes}-byte buffer, "
            f"got {buffer.nbytes}")
    return cd.instantiate([Value(buffer)], {})


def _materialize(val):
    # host attribute slots want natives, not Values
    if val.kind in (Kind.INSTANCE, Kind.FUNCTION, Kind.CLASS, Kind.ERROR):
        return val._data
    return val.to_python()


def _wrap(x):
    return x if isinstance(x, Value) else Value(x)


from . import value as _value  # noqa: E402

_value._hooks["classdef_for"] = classdef_for
_value._hooks["instantiate"] = instantiate
_value._hooks["instance_call"] = instance_call
_value._hooks["attr_get"] = attr_get
_value._hooks["attr_set"] = attr_set
_value._hooks["op_dispatch"] = op_dispatch
_value._hooks["is_class_def"] = lambda x: isinstance(x, ClassDef)
