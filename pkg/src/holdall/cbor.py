"""CBOR bytes <-> Value.

The encoder always emits preferred serialization: minimal-length
integer heads and the shortest of half / single / double precision
that round-trips each real (NaN canonicalizes to 0xf97e00).  Supported
heads cover majors 0-5, the float and simple forms of major 7, and two
registered tags:

* 24601 wraps ``{"f": format, "s": shape, "d": bytes}`` for buffers
  that carry a format other than plain bytes or a rank above one.
  Rank-one byte buffers map to the native major-2 byte string.
* 24602 wraps ``{"c": class name, "d": bytes}`` for instances whose
  class exposes a ``__buffer__`` method; decoding rebuilds the
  instance through the class's buffer-accepting constructor.

The decoder additionally accepts indefinite-length strings, arrays and
maps.  Map keys must be text strings.  Unsupported tags and simple
values raise ParseError; unsigned values beyond the 64-bit signed
range degrade to Real with a LossyConversionWarning.
"""

import math
import struct
import warnings

from .errors import LossyConversionWarning, ParseError, SerializeError
from .value import INT64_MAX, Buffer, Kind, Value

TAG_BUFFER = 24601
TAG_TYPED = 24602

_BREAK = object()


def dump_cbor(v):
    """Encode a Value as CBOR bytes."""
    if not isinstance(v, Value):
        v = Value(v)
    out = bytearray()
    _encode(v, out, "$")
    return bytes(out)


def _head(out, major, n):
    base = major << 5
    if n < 24:
        out.append(base | n)
    elif n <= 0xFF:
        out.append(base | 24)
        out.append(n)
    elif n <= 0xFFFF:
        out.append(base | 25)
        out += n.to_bytes(2, "big")
    elif n <= 0xFFFFFFFF:
        out.append(base | 26)
        out += n.to_bytes(4, "big")
    else:
        out.append(base | 27)
        out += n.to_bytes(8, "big")


def _encode_real(out, r):
    if math.isnan(r):
        out += b"\xf9\x7e\x00"
        return
    for code, prefix in (("e", 0xF9), ("f", 0xFA)):
        try:
            packed = struct.pack(f">{code}", r)
        except (OverflowError, struct.error):
            continue
        if struct.unpack(f">{code}", packed)[0] == r:
            out.append(prefix)
            out += packed
            return
    out.append(0xFB)
    out += struct.pack(">d", r)


def _encode(v, out, path):
    k = v.kind
    if k == Kind.UNDEFINED:
        out.append(0xF7)
    elif k == Kind.NULL:
        out.append(0xF6)
    elif k == Kind.BOOL:
        out.append(0xF5 if v._data else 0xF4)
    elif k == Kind.INTEGER:
        n = v._data
        if n >= 0:
            _head(out, 0, n)
        else:
            _head(out, 1, -1 - n)
    elif k == Kind.REAL:
        _encode_real(out, v._data)
    elif k == Kind.STRING:
        raw = v._data.encode("utf-8")
        _head(out, 3, len(raw))
        out += raw
    elif k == Kind.BUFFER:
        _encode_buffer(v._data, out)
    elif k == Kind.ARRAY:
        _head(out, 4, len(v._data))
        for i, e in enumerate(v._data):
            _encode(e, out, f"{path}[{i}]")
    elif k == Kind.OBJECT:
        _encode_map(v._data, out, path)
    elif k == Kind.INSTANCE:
        _encode_instance(v, out, path)
    else:
        raise SerializeError(f"{k.name} value at {path} is not CBOR-serializable",
                             path=path)


def _encode_map(mapping, out, path):
    _head(out, 5, len(mapping))
    for key, e in mapping.items():
        raw = key.encode("utf-8")
        _head(out, 3, len(raw))
        out += raw
        _encode(e, out, f"{path}.{key}")


def _encode_buffer(buf, out):
    if buf.format == "c" and len(buf.shape) == 1:
        _head(out, 2, buf.nbytes)
        out += buf.data
        return
    _head(out, 6, TAG_BUFFER)
    _head(out, 5, 3)
    for key in ("f", "s", "d"):
        _head(out, 3, 1)
        out += key.encode()
        if key == "f":
            raw = buf.format.encode()
            _head(out, 3, len(raw))
            out += raw
        elif key == "s":
            _head(out, 4, len(buf.shape))
            for n in buf.shape:
                _head(out, 0, n)
        else:
            _head(out, 2, buf.nbytes)
            out += buf.data


def _encode_instance(v, out, path):
    cd = v.class_def
    hook = cd.lookup_method("__buffer__") if cd is not None else None
    if hook is not None:
        from .classes import buffer_of
        buf = buffer_of(v)
        _head(out, 6, TAG_TYPED)
        _head(out, 5, 2)
        _head(out, 3, 1)
        out += b"c"
        raw = cd.name.encode("utf-8")
        _head(out, 3, len(raw))
        out += raw
        _head(out, 3, 1)
        out += b"d"
        _head(out, 2, buf.nbytes)
        out += buf.data
        return
    if cd is not None and cd.dynamic:
        _encode_map(v._data, out, path)
        return
    raise SerializeError(
        f"instance at {path} has no __buffer__ and is not dynamic", path=path)


def load_cbor(data):
    """Decode CBOR bytes to a Value.  Trailing bytes raise ParseError."""
    if isinstance(data, (bytearray, memoryview)):
        data = bytes(data)
    try:
        v, end = _decode(data, 0)
    except RecursionError:
        raise ParseError("nesting too deep") from None
    if v is _BREAK:
        raise ParseError("unexpected break code", offset=0)
    if end != len(data):
        raise ParseError(f"trailing data after offset {end}", offset=end)
    return v


def _need(data, offset, n):
    if offset + n > len(data):
        raise ParseError("unexpected end of input", offset=len(data))


def _read_head(data, offset):
    # returns (major, info, argument, next offset); argument is None
    # for indefinite-length / break (info 31)
    _need(data, offset, 1)
    byte = data[offset]
    major, info = byte >> 5, byte & 0x1F
    offset += 1
    if info < 24:
        return major, info, info, offset
    if info == 31:
        return major, info, None, offset
    if info in (28, 29, 30):
        raise ParseError(f"reserved additional info {info}", offset=offset - 1)
    size = 1 << (info - 24)
    _need(data, offset, size)
    n = int.from_bytes(data[offset:offset + size], "big")
    return major, info, n, offset + size


def _decode(data, offset):
    major, info, n, offset = _read_head(data, offset)
    if major == 0:
        if n is None:
            raise ParseError("indefinite length on integer", offset=offset - 1)
        if n > INT64_MAX:
            warnings.warn(
                f"integer {n} exceeds 64-bit range, degrading to Real",
                LossyConversionWarning, stacklevel=4)
            return Value(float(n)), offset
        return Value._raw(Kind.INTEGER, n), offset
    if major == 1:
        if n is None:
            raise ParseError("indefinite length on integer", offset=offset - 1)
        val = -1 - n
        if val < -(2**63):
            warnings.warn(
                f"integer {val} exceeds 64-bit range, degrading to Real",
                LossyConversionWarning, stacklevel=4)
            return Value(float(val)), offset
        return Value._raw(Kind.INTEGER, val), offset
    if major == 2:
        raw, offset = _read_string(data, offset, n, major=2)
        return Value._raw(Kind.BUFFER, Buffer(raw)), offset
    if major == 3:
        raw, offset = _read_string(data, offset, n, major=3)
        try:
            return Value._raw(Kind.STRING, raw.decode("utf-8")), offset
        except UnicodeDecodeError as e:
            raise ParseError("invalid UTF-8 in text string", offset=offset - len(raw) + e.start) from None
    if major == 4:
        items = []
        if n is None:
            while True:
                v, offset = _decode(data, offset)
                if v is _BREAK:
                    break
                items.append(v)
        else:
            for _ in range(n):
                v, offset = _decode(data, offset)
                if v is _BREAK:
                    raise ParseError("unexpected break in array", offset=offset - 1)
                items.append(v)
        return Value._raw(Kind.ARRAY, items), offset
    if major == 5:
        return _decode_map(data, offset, n)
    if major == 6:
        if n is None:
            raise ParseError("indefinite length on tag", offset=offset - 1)
        return _decode_tag(data, offset, n)
    # major 7
    return _decode_simple(info, n, offset)


def _read_string(data, offset, n, major):
    if n is not None:
        _need(data, offset, n)
        return bytes(data[offset:offset + n]), offset + n
    chunks = []
    while True:
        m, _info, cn, offset = _read_head(data, offset)
        if m == 7 and cn is None:
            break
        if m != major or cn is None:
            raise ParseError("bad chunk in indefinite-length string", offset=offset - 1)
        _need(data, offset, cn)
        chunks.append(bytes(data[offset:offset + cn]))
        offset += cn
    return b"".join(chunks), offset


def _decode_map(data, offset, n):
    d = {}
    def one(offset):
        kv, offset = _decode(data, offset)
        if kv is _BREAK:
            return None, None, offset
        if kv.kind != Kind.STRING:
            raise ParseError(
                f"map key of kind {kv.kind.name}; only text keys are supported",
                offset=offset)
        v, offset = _decode(data, offset)
        if v is _BREAK:
            raise ParseError("map value missing before break", offset=offset - 1)
        return kv._data, v, offset

    if n is None:
        while True:
            key, v, offset = one(offset)
            if key is None:
                break
            d[key] = v
    else:
        for _ in range(n):
            key, v, offset = one(offset)
            if key is None:
                raise ParseError("unexpected break in map", offset=offset - 1)
            d[key] = v
    return Value._raw(Kind.OBJECT, d), offset


def _decode_tag(data, offset, tag):
    content, offset = _decode(data, offset)
    if content is _BREAK:
        raise ParseError("break as tag content", offset=offset - 1)
    if tag == TAG_BUFFER:
        if content.kind != Kind.OBJECT or set(content._data) != {"f", "s", "d"}:
            raise ParseError(f"tag {TAG_BUFFER} content must be a {{f,s,d}} map",
                             offset=offset)
        fmt = content["f"].as_(str)
        shape = [e.as_(int) for e in content["s"].as_(list)]
        raw = content["d"].as_(bytes)
        try:
            return Value._raw(Kind.BUFFER, Buffer(raw, fmt, shape)), offset
        except Exception as e:
            raise ParseError(f"inconsistent buffer: {e}", offset=offset) from None
    if tag == TAG_TYPED:
        if content.kind != Kind.OBJECT or set(content._data) != {"c", "d"}:
            raise ParseError(f"tag {TAG_TYPED} content must be a {{c,d}} map",
                             offset=offset)
        name = content["c"].as_(str)
        raw = content["d"].as_(bytes)
        from .classes import construct_from_buffer, find_class
        cd = find_class(name)
        if cd is None:
            warnings.warn(f"unknown class {name!r} in typed CBOR value",
                          stacklevel=5)
            tagged = {"__tag__": Value(TAG_TYPED), "c": content["c"],
                      "d": content["d"]}
            return Value._raw(Kind.OBJECT, tagged), offset
        return construct_from_buffer(cd, Buffer(raw)), offset
    raise ParseError(f"unsupported tag {tag}", offset=offset)


def _decode_simple(info, n, offset):
    if info == 31:
        return _BREAK, offset
    if info == 20:
        return Value._raw(Kind.BOOL, False), offset
    if info == 21:
        return Value._raw(Kind.BOOL, True), offset
    if info == 22:
        return Value._raw(Kind.NULL, None), offset
    if info == 23:
        return Value._raw(Kind.UNDEFINED, None), offset
    if info == 25:
        return Value._raw(Kind.REAL, struct.unpack(">e", n.to_bytes(2, "big"))[0]), offset
    if info == 26:
        return Value._raw(Kind.REAL, struct.unpack(">f", n.to_bytes(4, "big"))[0]), offset
    if info == 27:
        return Value._raw(Kind.REAL, struct.unpack(">d", n.to_bytes(8, "big"))[0]), offset
    # simple values 0-19 and the one-byte extension form
    raise ParseError(f"unsupported simple value {n}", offset=offset - 1)
