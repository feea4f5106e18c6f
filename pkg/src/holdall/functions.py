"""Callable wrapping, overload sets and argument binding.

`wrap` turns a host callable into a FunctionDef: one named function
with an ordered chain of overloads.  Each overload's parameters carry
a name, an optional declared type and an optional default.  Binding a
call site fills positionals left to right, then keywords by name, then
defaults, and scores the argument list against the declared types:

====================================  ====
conversion                            cost
====================================  ====
exact kind                               0
Integer -> Real                          1
Real -> Integer (truncates)              2
Instance -> ancestor, per hop            1
owned Instance -> reference form         1
anything -> untyped (generic Value)      3
====================================  ====

No edge means the overload is rejected.  The overload with the lowest
total cost wins; ties go to the earliest registered.  When nothing
binds, the CallError lists every overload with its failure reason.
"""

import inspect
import logging

from .errors import ArityError, CallError, CastError
from .value import Buffer, HolderMode, Kind, Value, _TypeQuery

log = logging.getLogger(__name__)

_REQUIRED = object()


class arg:
    """Parameter spec for `wrap`: name, optional default, optional type."""

    __slots__ = ("name", "default", "type")

    def __init__(self, name, default=_REQUIRED, type=None):
        self.name = name
        self.default = default
        self.type = type


class Param:
    __slots__ = ("name", "declared", "default")

    def __init__(self, name, declared=None, default=None):
        self.name = name
        self.declared = declared  # None means untyped / generic
        self.default = default    # a Value, or None when required

    def describe(self):
        d = {"name": self.name, "type": type_name(self.declared)}
        if self.default is not None:
            d["default"] = self.default
        return d


class Overload:
    __slots__ = ("params", "fn", "index", "variadic", "returns")

    def __init__(self, params, fn, variadic=False, returns=None):
        self.params = params
        self.fn = fn
        self.index = {p.name: i for i, p in enumerate(params)}
        self.variadic = variadic
        self.returns = returns

    def signature(self):
        if self.variadic:
            return "(...)"
        parts = []
        for p in self.params:
            s = p.name
            if p.declared is not None:
                s += f": {type_name(p.declared)}"
            if p.default is not None:
                s += f" = {p.default}"
            parts.append(s)
        return "(" + ", ".join(parts) + ")"


class FunctionDef:
    """Named function with an ordered overload chain."""

    __slots__ = ("name", "doc", "overloads", "is_method")

    def __init__(self, name, doc=""):
        self.name = name
        self.doc = doc or ""
        self.overloads = []
        self.is_method = False

    def add(self, overload):
        self.overloads.append(overload)
        return self

    def invoke(self, pos, kw):
        return _invoke(self, pos, kw)

    def __call__(self, *args, **kwargs):
        pos = [a if isinstance(a, Value) else Value(a) for a in args]
        kw = {n: (a if isinstance(a, Value) else Value(a)) for n, a in kwargs.items()}
        return self.invoke(pos, kw)

    def describe(self):
        overs = []
        for ov in self.overloads:
            entry = {"params": [p.describe() for p in ov.params]}
            if ov.variadic:
                entry["variadic"] = True
            if ov.returns is not None:
                entry["returns"] = type_name(ov.returns)
            overs.append(entry)
        return Value({"name": self.name, "doc": self.doc, "overloads": overs})

    def __repr__(self):
        return f"<FunctionDef {self.name} x{len(self.overloads)}>"


class BoundFunction(FunctionDef):
    """FunctionDef partially applied to a receiver."""

    __slots__ = ("base", "receiver")

    def __init__(self, base, receiver):
        super().__init__(base.name, base.doc)
        self.base = base
        self.receiver = receiver
        self.overloads = base.overloads

    def invoke(self, pos, kw):
        return self.base.invoke([self.receiver] + list(pos), kw)


def wrap(fn, *specs, name=None, doc=None, self_type=None):
    """Build a single-overload FunctionDef around a host callable.

    Positional `specs` are `arg(...)` entries or bare types, one per
    parameter; a trailing plain string becomes the doc.  Specs override
    or replace what signature introspection found.  Variadic callables
    get a pass-through overload that hands Values straight to the host.
    A spec count that disagrees with the parameter list raises
    ArityError.
    """
    specs = list(specs)
    if specs and isinstance(specs[-1], str):
        if doc is None:
            doc = specs[-1]
        specs = specs[:-1]
    specs = [s if isinstance(s, arg) else arg(None, type=s) for s in specs]

    fname = name or getattr(fn, "__name__", None) or "<anonymous>"
    if doc is None:
        doc = inspect.getdoc(fn) or ""
    fd = FunctionDef(fname, doc)
    fd.add(_overload_for(fn, specs, self_type))
    return fd


def _overload_for(fn, specs, self_type=None):
    # with self_type set, the first parameter is the receiver and the
    # specs describe the remaining ones
    params, variadic = _introspect(fn)
    if variadic:
        if specs:
            raise ArityError(
                f"{getattr(fn, '__name__', fn)!r} is variadic; parameter specs do not apply")
        return Overload([], fn, variadic=True)
    if params is None:
        # opaque callable: the specs are the only source of parameters
        params = [Param(s.name or f"arg{i}") for i, s in enumerate(specs)]
        if self_type is not None:
            params.insert(0, Param("self"))
    rest = params[1:] if self_type is not None else params
    if specs and len(specs) != len(rest):
        # a shorter spec list may expose a prefix, provided every
        # uncovered parameter can fill from its own default
        if (len(specs) < len(rest)
                and all(p.default is not None for p in rest[len(specs):])):
            del rest[len(specs):]
            base = 1 if self_type is not None else 0
            del params[base + len(specs):]
        else:
            raise ArityError(
                f"{len(specs)} parameter specs for {len(rest)} parameters "
                f"of {getattr(fn, '__name__', fn)!r}")
    for i, s in enumerate(specs):
        p = rest[i]
        if s.name is not None:
            p.name = s.name
        if s.type is not None:
            p.declared = s.type
        if s.default is not _REQUIRED:
            p.default = s.default if isinstance(s.default, Value) else Value(s.default)
    if self_type is not None:
        if not params:
            raise ArityError(
                f"{getattr(fn, '__name__', fn)!r} is a method but takes no receiver")
        if params[0].declared is None:
            params[0].declared = self_type
    _check_default_suffix(params, fn)
    returns = None
    try:
        ra = inspect.signature(fn).return_annotation
        if ra is not inspect.Signature.empty:
            returns = ra
    except (ValueError, TypeError):
        pass
    return Overload(params, fn, returns=returns)


def _introspect(fn):
    try:
        sig = inspect.signature(fn)
    except (ValueError, TypeError):
        return None, False
    hints = None
    params = []
    for p in sig.parameters.values():
        if p.kind in (p.VAR_POSITIONAL, p.VAR_KEYWORD):
            return None, True
        declared = None if p.annotation is sig.empty else p.annotation
        if isinstance(declared, str):
            # module used string annotations; resolve them once
            if hints is None:
                try:
                    import typing
                    hints = typing.get_type_hints(fn)
                except Exception:
                    hints = {}
            declared = hints.get(p.name)
        default = None if p.default is sig.empty else (
            p.default if isinstance(p.default, Value) else Value(p.default))
        params.append(Param(p.name, declared, default))
    return params, False


def _check_default_suffix(params, fn):
    seen_default = False
    for p in params:
        if p.default is not None:
            seen_default = True
        elif seen_default:
            raise ArityError(
                f"required parameter {p.name!r} after a defaulted one "
                f"in {getattr(fn, '__name__', fn)!r}")


_STRICT_KINDS = {
    bool: Kind.BOOL, int: Kind.INTEGER, float: Kind.REAL, str: Kind.STRING,
    bytes: Kind.BUFFER, bytearray: Kind.BUFFER, Buffer: Kind.BUFFER,
    list: Kind.ARRAY, tuple: Kind.ARRAY, dict: Kind.OBJECT,
    type(None): Kind.NULL,
}


def cast_cost(v, declared):
    """Cost of converting `v` to `declared`, or None when no edge exists."""
    if declared is None or declared is Value:
        return 3
    k = v.kind
    strict = _STRICT_KINDS.get(declared)
    if strict is not None:
        if k == strict:
            return 0
        if declared is float and k == Kind.INTEGER:
            return 1
        if declared is int and k == Kind.REAL:
            return 2
        return None
    if isinstance(declared, _TypeQuery):
        if k != Kind.INSTANCE or not v._is_exact_class(declared.cls):
            return None
        mode = v.holder_mode
        if declared.form == "ref":
            return 0 if mode == HolderMode.BY_REFERENCE else 1
        if declared.form == "shared":
            return 0 if mode == HolderMode.BY_SHARED_OWNER else None
        if mode == HolderMode.BY_UNIQUE_OWNER and not v._inst.moved:
            return 0
        return None
    if isinstance(declared, type):
        if k == Kind.INSTANCE:
            payload_type = type(v._data)
            cd = v.class_def
            if cd is not None and cd.host_type is not None:
                payload_type = cd.host_type
            if payload_type is declared:
                return 0
            try:
                return payload_type.__mro__.index(declared)
            except ValueError:
                return None
        if k == Kind.ERROR and isinstance(v._data, declared):
            return type(v._data).__mro__.index(declared)
        return None
    return None


# kinds whose payload already is the declared native, skipping cast()
_EXACT_SCALAR = {
    int: Kind.INTEGER, float: Kind.REAL, str: Kind.STRING, bool: Kind.BOOL,
}


def convert(v, declared):
    """Materialize `v` for the host boundary as `declared`.

    Untyped parameters receive the Value itself.  Container types
    produce plain Python natives.  Everything else routes through the
    strict-then-lattice cast.
    """
    if declared is None or declared is Value:
        return v
    k = _EXACT_SCALAR.get(declared)
    if k is not None and v._kind == k:
        return v._data
    if declared in (list, tuple, dict, bytes, bytearray):
        v.as_(declared)  # kind check only
        out = v.to_python()
        return declared(out) if declared is not list else out
    return v.cast(declared)


def _invoke(fdef, pos, kw):
    overloads = fdef.overloads
    if not overloads:
        raise CallError(f"{fdef.name} has no overloads")
    best = None
    best_cost = None
    failures = []
    for ov in overloads:
        bound = _bind(ov, pos, kw)
        if isinstance(bound, str):
            failures.append(f"{fdef.name}{ov.signature()}: {bound}")
            continue
        cost, slots = bound
        if cost == 0:
            best, best_cost = (ov, slots), 0
            break
        if best_cost is None or cost < best_cost:
            best, best_cost = (ov, slots), cost
    if best is None:
        raise CallError(
            f"no overload of {fdef.name} accepts the call:\n  "
            + "\n  ".join(failures),
            failures=failures)
    ov, slots = best
    if ov.variadic:
        return _wrap_result(ov.fn(*slots[0], **slots[1]))
    args = []
    for p, s in zip(ov.params, slots):
        try:
            args.append(convert(s, p.declared))
        except CastError as e:
            raise CallError(
                f"{fdef.name}: converting argument {p.name!r}: {e}") from None
    return _wrap_result(ov.fn(*args))


def _wrap_result(r):
    return r if isinstance(r, Value) else Value(r)


def _bind(ov, pos, kw):
    # returns (total cost, slot list) or a failure reason string
    if ov.variadic:
        return 3, (list(pos), dict(kw))
    params = ov.params
    n = len(params)
    if len(pos) > n:
        return f"takes at most {n} arguments, got {len(pos)}"
    slots = list(pos) + [None] * (n - len(pos))
    if kw:
        for name, v in kw.items():
            i = ov.index.get(name)
            if i is None:
                return f"no parameter named {name!r}"
            if i < len(pos):
                return f"got multiple values for {name!r}"
            if slots[i] is not None:
                return f"got multiple values for {name!r}"
            slots[i] = v
    total = 0
    for i in range(n):
        s = slots[i]
        p = params[i]
        if s is None:
            if p.default is None:
                return f"missing required argument {p.name!r}"
            slots[i] = p.default
            continue
        c = cast_cost(s, p.declared)
        if c is None:
            return (f"argument {p.name!r}: no conversion from "
                    f"{s.kind.name} to {type_name(p.declared)}")
        total += c
    return total, slots


def type_name(declared):
    if declared is None or declared is Value:
        return "any"
    if isinstance(declared, _TypeQuery):
        return f"{declared.form}({declared.cls.__name__})"
    if declared is type(None):
        return "null"
    return getattr(declared, "__name__", str(declared))


def _wrap_plain(fn):
    if isinstance(fn, FunctionDef):
        return fn
    return wrap(fn)


# make() needs to recognize and produce FunctionDefs without importing
# this module at its own import time
from . import value as _value  # noqa: E402

_value._hooks["wrap_callable"] = _wrap_plain
_value._hooks["invoke"] = lambda fdef, pos, kw: fdef.invoke(pos, kw)
_value._hooks["is_function_def"] = lambda x: isinstance(x, FunctionDef)
