import pytest

from holdall import (
    Value, Kind, HolderMode, Buffer, arg,
    register_class, dynamic_class, find_class,
    CallError, CastError, MemberError, DefinitionError,
    load_cbor, dump_cbor,
)


class Person:
    def __init__(self, name):
        self._name = name

    def info(self):
        return f'{{"name":"{self._name}"}}'

    def rename(self, name):
        self._name = name


class Student(Person):
    def __init__(self, name, school):
        super().__init__(name)
        self._school = school

    def intro(self):
        return f"{self._name} at {self._school}"


def register_person():
    return (register_class(Person, doc="a simple person")
            .construct(str)
            .def_("info", Person.info)
            .def_("rename", Person.rename, arg("name", type=str))
            .def_readonly("name", "_name"))


def register_student():
    return (register_class(Student)
            .construct(str, str)
            .inherit(Person)
            .def_("intro", Student.intro)
            .def_readwrite("school", "_school"))


def test_construct_and_call():
    P = register_person().value
    p = P("ada")
    assert p.kind == Kind.INSTANCE
    assert p.holder_mode == HolderMode.BY_VALUE
    assert p.call("info").to_python() == '{"name":"ada"}'


def test_method_with_typed_arg():
    register_person()
    p = find_class("Person").instantiate([Value("x")], {})
    p.call("rename", "grace")
    assert p.call("info").to_python() == '{"name":"grace"}'


def test_property_read():
    register_person()
    P = find_class("Person")
    p = P.instantiate([Value("ada")], {})
    assert p.get("name").to_python() == "ada"


def test_readonly_property_rejects_write():
    register_person()
    p = find_class("Person").instantiate([Value("a")], {})
    with pytest.raises(MemberError):
        p.set("name", "b")


def test_readwrite_property():
    register_person()
    register_student()
    s = find_class("Student").instantiate([Value("a"), Value("mit")], {})
    assert s.get("school").to_python() == "mit"
    s.set("school", "eth")
    assert s.get("school").to_python() == "eth"


def test_inherited_method_resolution():
    register_person()
    register_student()
    s = find_class("Student").instantiate([Value("bob"), Value("x")], {})
    assert s.call("info").to_python() == '{"name":"bob"}'
    assert s.call("intro").to_python() == "bob at x"


def test_strict_extraction_respects_hierarchy():
    register_person()
    register_student()
    s = find_class("Student").instantiate([Value("b"), Value("y")], {})
    assert isinstance(s.as_(Student), Student)
    with pytest.raises(CastError):
        s.as_(Person)          # strict: exact class only
    assert isinstance(s.cast(Person), Person)


def test_missing_member():
    register_person()
    p = find_class("Person").instantiate([Value("a")], {})
    with pytest.raises(MemberError):
        p.call("fly")
    with pytest.raises(MemberError):
        p.get("wings")


def test_statics():
    (register_class(Person, name="P2")
     .construct(str)
     .def_static("species", lambda: "homo sapiens"))
    cd = find_class("P2")
    assert cd.call_static_member("species", [], {}).to_python() == \
        "homo sapiens"


def test_registry_replace_warns(caplog):
    import logging
    register_person()
    with caplog.at_level(logging.WARNING, logger="holdall.classes"):
        register_person()
    assert any("re-registered" in r.message for r in caplog.records)


def test_dynamic_class_state():
    d = dynamic_class("Point", doc="2d point")
    d.def_("__init__", lambda self, x, y: (self.set("x", x),
                                           self.set("y", y)) and None,
           arg("x"), arg("y"))
    P = d.value
    p = P(3, 4)
    assert p.get("x").to_python() == 3
    assert p.kind == Kind.INSTANCE
    p.set("x", 9)
    assert p.get("x").to_python() == 9
    assert p.dump_json() == '{"x":9,"y":4}'


def test_dynamic_class_without_ctor_requires_no_args():
    d = dynamic_class("Bag")
    B = d.value
    b = B()
    b.set("k", 1)
    assert b.get("k").to_python() == 1
    with pytest.raises(CallError):
        B(1)


def test_dynamic_readwrite_rejected():
    d = dynamic_class("NoProps")
    with pytest.raises(DefinitionError):
        d.def_readwrite("x", "x")


class Complex:
    def __init__(self, r=0.0, i=0.0):
        self.r, self.i = r, i


def register_complex():
    cb = (register_class(Complex)
          .construct(float, float)
          .def_("__add__",
                lambda a, b: Complex(a.r + b.r, a.i + b.i),
                arg("b", type=Complex))
          .def_("__eq__",
                lambda a, b: a.r == b.r and a.i == b.i,
                arg("b", type=Complex))
          .def_("__neg__", lambda a: Complex(-a.r, -a.i))
          .def_("__str__", lambda a: f"{a.r}+{a.i}i"))
    return cb


def test_operator_dispatch():
    register_complex()
    C = find_class("Complex")
    a = C.instantiate([Value(1.0), Value(2.0)], {})
    b = C.instantiate([Value(2.0), Value(3.0)], {})
    s = a + b
    assert s == C.instantiate([Value(3.0), Value(5.0)], {})
    assert str(s) == "3.0+5.0i"
    n = -a
    assert n == C.instantiate([Value(-1.0), Value(-2.0)], {})


def test_eq_falls_back_to_identity():
    class Opaque:
        pass
    register_class(Opaque).construct()
    O = find_class("Opaque")
    a = O.instantiate([], {})
    b = O.instantiate([], {})
    assert a == a.copy()
    assert a != b


def test_unknown_operator_name_rejected():
    class T:
        pass
    with pytest.raises(DefinitionError):
        register_class(T).def_("__matmul__", lambda a, b: a)


def test_getitem_operator():
    class Grid:
        def __init__(self):
            self.cells = {0: "a", 1: "b"}
    (register_class(Grid)
     .construct()
     .def_("__getitem__", lambda g, i: g.cells[i], arg("i", type=int))
     .def_("__setitem__",
           lambda g, i, v: g.cells.__setitem__(i, v.to_python()),
           arg("i", type=int), arg("v")))
    G = find_class("Grid")
    g = G.instantiate([], {})
    assert g[1].to_python() == "b"
    g[0] = "z"
    assert g[0].to_python() == "z"


class Point2d:
    def __init__(self, x=0.0, y=0.0):
        if isinstance(x, Buffer):
            # restored from the 16-byte wire form; layout is ours to know
            import struct
            self.x, self.y = struct.unpack("<2d", x.tobytes())
        else:
            self.x, self.y = x, y


def test_buffer_protocol_cbor_round_trip():
    (register_class(Point2d)
     .construct(arg("x", type=float), arg("y", type=float))
     .construct(Buffer)
     .expect_buffer_bytes(16)
     .def_("__buffer__",
           lambda p: Buffer.pack([p.x, p.y], "d"))
     .def_("__add__",
           lambda a, b: Point2d(a.x + b.x, a.y + b.y),
           arg("b", type=Point2d)))
    P = find_class("Point2d")
    a = P.instantiate([Value(1.0), Value(2.0)], {})
    b = P.instantiate([Value(3.0), Value(4.0)], {})
    blob = dump_cbor(Value([a, b]))
    back = load_cbor(blob)
    s = back[0] + back[1]
    out = s.as_(Point2d)
    assert out.x == 4.0
    assert out.y == 6.0


def test_instance_str_default_form():
    class Plain:
        pass
    register_class(Plain).construct()
    p = find_class("Plain").instantiate([], {})
    assert "Plain@" in str(p)
