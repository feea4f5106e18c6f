import math
import random
import warnings

import pytest

from holdall import (
    Value, Kind, Buffer, dump_cbor, load_cbor, parse_json, dump_json,
    equals_exact, ParseError, LossyConversionWarning,
    register_class, find_class, arg,
)

from cbor_vectors import VECTORS, NAN


def check_expected(v, expected):
    if expected is NAN:
        assert v.kind == Kind.REAL and math.isnan(v.to_python())
        return
    if expected == "__undefined__":
        assert v.kind == Kind.UNDEFINED
        return
    if isinstance(expected, bytes):
        assert v.kind == Kind.BUFFER
        assert v.as_(Buffer).tobytes() == expected
        return
    got = v.to_python()
    assert got == expected
    if isinstance(expected, bool):
        assert isinstance(got, bool)
    elif isinstance(expected, int):
        assert v.kind == Kind.INTEGER
    elif isinstance(expected, float):
        assert v.kind == Kind.REAL
        if expected == 0.0:
            assert math.copysign(1.0, got) == math.copysign(1.0, expected)


@pytest.mark.parametrize(
    "hexs,expected,mode", VECTORS,
    ids=[f"{i:02d}-{h[:16]}" for i, (h, _, _) in enumerate(VECTORS)])
def test_appendix_vectors(hexs, expected, mode):
    data = bytes.fromhex(hexs)
    if mode == "error":
        with pytest.raises(ParseError):
            load_cbor(data)
        return
    if mode == "lossy":
        with pytest.warns(LossyConversionWarning):
            v = load_cbor(data)
        assert v.kind == Kind.REAL
        assert v.to_python() == expected
        return
    v = load_cbor(data)
    check_expected(v, expected)
    if mode == "exact":
        assert dump_cbor(v).hex() == hexs


def test_undefined_round_trip():
    assert dump_cbor(Value()) == b"\xf7"
    assert load_cbor(b"\xf7").kind == Kind.UNDEFINED


def test_trailing_bytes_rejected():
    with pytest.raises(ParseError):
        load_cbor(b"\x01\x01")


def test_truncated_input_rejected():
    good = dump_cbor(Value({"a": [1, 2, 3]}))
    for cut in range(1, len(good)):
        with pytest.raises(ParseError):
            load_cbor(good[:cut])


def test_empty_input_rejected():
    with pytest.raises(ParseError):
        load_cbor(b"")


def test_typed_buffer_tag_round_trip():
    b = Buffer.pack([1.5, -2.5, 3.25], "f", (3,))
    v = Value(b)
    blob = dump_cbor(v)
    back = load_cbor(blob)
    assert back.kind == Kind.BUFFER
    got = back.as_(Buffer)
    assert got.format == "f"
    assert got.shape == (3,)
    assert got.unpack() == [1.5, -2.5, 3.25]


def test_all_buffer_formats_round_trip():
    cases = {
        "b": [-1, 0, 127], "B": [0, 255, 7], "h": [-300, 300, 0],
        "H": [0, 65535, 1], "i": [-70000, 70000, 0], "I": [0, 2**31, 5],
        "q": [-2**60, 2**60, 0], "Q": [0, 2**63, 9],
        "f": [0.5, -0.5, 2.0], "d": [1.1, -2.2, 3.3],
    }
    for fmt, vals in cases.items():
        b = Buffer.pack(vals, fmt)
        back = load_cbor(dump_cbor(Value(b))).as_(Buffer)
        assert back.format == fmt
        assert back.unpack() == vals, fmt


def test_multidim_buffer_keeps_shape():
    b = Buffer.pack(range(6), "i", (2, 3))
    back = load_cbor(dump_cbor(Value(b))).as_(Buffer)
    assert back.shape == (2, 3)


def test_plain_byte_buffer_uses_bare_major2():
    blob = dump_cbor(Value(b"\x01\x02"))
    assert blob == b"\x42\x01\x02"


def test_unknown_typed_class_degrades_to_tagged_object():
    # encode an instance of a registered class, then decode in a world
    # where that name is unknown
    class Temp:
        def __init__(self, n=0):
            self.n = n
    (register_class(Temp, name="Ephemeral")
     .construct(arg("n", type=int))
     .expect_buffer_bytes(1)
     .def_("__buffer__", lambda t: Buffer(bytes([t.n]))))
    inst = find_class("Ephemeral").instantiate([Value(5)], {})
    blob = dump_cbor(inst)

    from holdall import classes as _c
    with _c._LOCK:
        saved = _c._BY_NAME.pop("Ephemeral")
    try:
        with pytest.warns(UserWarning):
            v = load_cbor(blob)
        assert v.kind == Kind.OBJECT
        assert "__tag__" in v
    finally:
        with _c._LOCK:
            _c._BY_NAME["Ephemeral"] = saved


def test_cross_codec_agreement():
    rng = random.Random(7)
    from test_codec import random_tree
    for _ in range(150):
        tree = random_tree(rng, rng.randint(0, 5))
        v = Value(tree)
        via_cbor = load_cbor(dump_cbor(v))
        via_json = parse_json(dump_json(v))
        assert equals_exact(via_cbor, v)
        assert equals_exact(via_cbor, via_json)


def test_integer_encodes_minimal_width():
    assert dump_cbor(Value(23)) == b"\x17"
    assert dump_cbor(Value(24)) == b"\x18\x18"
    assert dump_cbor(Value(255)) == b"\x18\xff"
    assert dump_cbor(Value(256)) == b"\x19\x01\x00"
    assert dump_cbor(Value(65536)) == b"\x1a\x00\x01\x00\x00"
    assert dump_cbor(Value(2**32)) == b"\x1b\x00\x00\x00\x01\x00\x00\x00\x00"
    assert dump_cbor(Value(-24)) == b"\x37"
    assert dump_cbor(Value(-25)) == b"\x38\x18"


def test_long_string_and_map():
    s = "x" * 300
    assert load_cbor(dump_cbor(Value(s))).to_python() == s
    m = {f"key{i}": i for i in range(100)}
    assert load_cbor(dump_cbor(Value(m))).to_python() == m
