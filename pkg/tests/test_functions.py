import pytest

from holdall import (
    Value, Kind, FunctionDef, arg, wrap,
    ArityError, CallError, CastError,
)
from holdall.functions import cast_cost, convert


def add2(a, b):
    return a + b


def test_wrap_and_call():
    f = wrap(add2, arg("a", type=int), arg("b", type=int))
    assert f.name == "add2"
    r = f(1, 2)
    assert isinstance(r, Value)
    assert r.to_python() == 3


def test_introspection_picks_up_defaults():
    def f(a, b=10):
        return a + b
    fd = wrap(f, arg("a", type=int), arg("b", type=int))
    assert fd(5).to_python() == 15
    assert fd(5, 1).to_python() == 6


def test_kwargs_any_order():
    f = wrap(add2, arg("a", type=int), arg("b", type=int))
    assert f(b=2, a=1).to_python() == 3
    assert f(1, b=2).to_python() == 3


def test_kwargs_errors():
    f = wrap(add2, arg("a", type=int), arg("b", type=int))
    with pytest.raises(CallError):
        f(1, 2, 3)
    with pytest.raises(CallError):
        f(1, a=1)
    with pytest.raises(CallError):
        f(1, c=1)
    with pytest.raises(CallError):
        f(1)


def test_untyped_parameter_receives_value():
    seen = {}

    def probe(x):
        seen["x"] = x
        return None

    f = wrap(probe, arg("x"))
    f(41)
    assert isinstance(seen["x"], Value)
    assert seen["x"].kind == Kind.INTEGER


def test_declared_containers_materialize_natives():
    def total(items):
        assert isinstance(items, list)
        return sum(items)

    f = wrap(total, arg("items", type=list))
    assert f([1, 2, 3]).to_python() == 6

    def greet(cfg):
        assert isinstance(cfg, dict)
        return cfg["name"]

    g = wrap(greet, arg("cfg", type=dict))
    assert g({"name": "ada"}).to_python() == "ada"


def test_declared_bytes():
    def size(blob):
        assert isinstance(blob, bytes)
        return len(blob)

    f = wrap(size, arg("blob", type=bytes))
    assert f(b"abc").to_python() == 3


def test_overload_chain_by_arity():
    fd = FunctionDef("add")
    fd.add(wrap(lambda a, b: a + b, arg("a", type=int),
                arg("b", type=int)).overloads[0])
    fd.add(wrap(lambda a, b, c: a + b + c, arg("a", type=int),
                arg("b", type=int), arg("c", type=int)).overloads[0])
    assert fd(1, 2).to_python() == 3
    assert fd(1, 2, 3).to_python() == 6


def test_cost_prefers_exact_lane():
    hits = []
    fd = FunctionDef("pick")
    fd.add(wrap(lambda x: hits.append("int") or "int",
                arg("x", type=int)).overloads[0])
    fd.add(wrap(lambda x: hits.append("float") or "float",
                arg("x", type=float)).overloads[0])
    assert fd(3).to_python() == "int"
    assert fd(3.5).to_python() == "float"
    # Integer -> Real costs 1, Real -> Integer costs 2
    hits.clear()
    fd2 = FunctionDef("pick2")
    fd2.add(wrap(lambda x: "float", arg("x", type=float)).overloads[0])
    assert fd2(3).to_python() == "float"


def test_registration_order_breaks_ties():
    fd = FunctionDef("tie")
    fd.add(wrap(lambda x: "first", arg("x")).overloads[0])
    fd.add(wrap(lambda x: "second", arg("x")).overloads[0])
    assert fd(1).to_python() == "first"


def test_call_error_lists_all_failures():
    fd = FunctionDef("f")
    fd.add(wrap(lambda a: a, arg("a", type=int)).overloads[0])
    fd.add(wrap(lambda a, b: a, arg("a", type=int),
                arg("b", type=str)).overloads[0])
    with pytest.raises(CallError) as ei:
        fd("nope", 3)
    msg = str(ei.value)
    assert msg.count("\n") >= 2
    assert ei.value.failures and len(ei.value.failures) == 2


def test_variadic_passthrough():
    def collect(*args, **kw):
        return [a.to_python() for a in args] + sorted(kw)
    f = wrap(collect)
    assert f(1, 2, z=3).to_python() == [1, 2, "z"]


def test_trailing_string_spec_is_doc():
    f = wrap(add2, arg("a", type=int), arg("b", type=int), "adds a and b")
    assert f.doc == "adds a and b"


def test_bare_type_specs():
    f = wrap(add2, int, int)
    assert f(2, 3).to_python() == 5


def test_spec_count_mismatch():
    with pytest.raises(ArityError):
        wrap(add2, arg("a", type=int))


def test_required_after_default_rejected():
    with pytest.raises(ArityError):
        wrap(lambda a, b: a, arg("a", 1, type=int), arg("b", type=int))


def test_default_values_fill_missing():
    f = wrap(lambda a, b: (a, b), arg("a", type=int), arg("b", 7, type=int))
    assert f(1).to_python() == [1, 7]


def test_cast_cost_table():
    assert cast_cost(Value(1), int) == 0
    assert cast_cost(Value(1), float) == 1
    assert cast_cost(Value(1.5), int) == 2
    assert cast_cost(Value(1), None) == 3
    assert cast_cost(Value("s"), int) is None
    assert cast_cost(Value(True), bool) == 0
    assert cast_cost(Value(True), int) is None


def test_convert_untyped_returns_value():
    v = Value(1)
    assert convert(v, None) is v
    assert convert(v, Value) is v


def test_result_wrapping():
    f = wrap(lambda: None)
    assert f().kind == Kind.NULL
    g = wrap(lambda: Value(5))
    assert g().to_python() == 5


def test_string_annotations_resolve():
    def typed(a: "int", b: "int") -> "int":
        return a * b
    f = wrap(typed)
    assert f(3, 4).to_python() == 12


def test_exceptions_propagate():
    f = wrap(lambda: 1 / 0)
    with pytest.raises(ZeroDivisionError):
        f()
