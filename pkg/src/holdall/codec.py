"""JSON text <-> Value.

Parsing leans on the stdlib tokenizer but pins the semantics this
package needs: integers that fit 64 bits stay Integer, larger ones
degrade to Real with a LossyConversionWarning, duplicate object keys
keep the last occurrence, and the NaN / Infinity extensions are
rejected.  Dumping is hand-rolled so that error messages can name the
offending node by path (``$.rows[3].blob``) and so the number and
string forms stay under our control: reals use the shortest
round-tripping decimal, non-finite reals refuse to serialize.
"""

import json
import math
import re
import warnings

from .errors import LossyConversionWarning, ParseError, SerializeError
from .value import INT64_MAX, INT64_MIN, Kind, Value


def _parse_int(text):
    n = int(text)
    if INT64_MIN <= n <= INT64_MAX:
        return n
    warnings.warn(
        f"integer {text} exceeds 64-bit range, degrading to Real",
        LossyConversionWarning, stacklevel=6)
    return float(n)


def _reject_constant(name):
    raise ParseError(f"{name} is not valid JSON")


def _pairs(pairs):
    d = {}
    for key, v in pairs:
        d[key] = v  # duplicate keys: last occurrence wins
    return d


def parse_json(text):
    """Decode a JSON document to a Value.

    Accepts str or UTF-8 bytes.  Malformed input raises ParseError with
    the character offset where decoding stopped.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"invalid UTF-8 at byte {e.start}", offset=e.start) from None
    try:
        obj = json.loads(
            text,
            parse_int=_parse_int,
            parse_constant=_reject_constant,
            object_pairs_hook=_pairs,
        )
    except json.JSONDecodeError as e:
        raise ParseError(f"{e.msg} at offset {e.pos}", offset=e.pos) from None
    except RecursionError:
        raise ParseError("nesting too deep") from None
    return Value(obj)


_ESCAPE = re.compile(r'[\x00-\x1f"\\]')
_ESCAPE_MAP = {
    '"': '\\"', "\\": "\\\\", "\b": "\\b", "\f": "\\f",
    "\n": "\\n", "\r": "\\r", "\t": "\\t",
}


def _escape_char(m):
    c = m.group(0)
    try:
        return _ESCAPE_MAP[c]
    except KeyError:
        return f"\\u{ord(c):04x}"


def _quote(s):
    return f'"{_ESCAPE.sub(_escape_char, s)}"'


def dump_json(v, indent=None):
    """Encode a Value as JSON text.

    Undefined, Buffer, Function, Class, Error and instances of host
    classes do not serialize; the SerializeError names the node by
    path.  Instances of dynamic classes serialize as their state map.
    `indent` switches to pretty form with that many spaces per level.
    """
    if not isinstance(v, Value):
        v = Value(v)
    out = []
    _dump(v, out, "$", indent, 0)
    return "".join(out)


def _dump(v, out, path, indent, level):
    k = v.kind
    if k == Kind.NULL:
        out.append("null")
    elif k == Kind.BOOL:
        out.append("true" if v._data else "false")
    elif k == Kind.INTEGER:
        out.append(str(v._data))
    elif k == Kind.REAL:
        r = v._data
        if math.isnan(r) or math.isinf(r):
            raise SerializeError(f"non-finite real at {path}", path=path)
        out.append(repr(r))
    elif k == Kind.STRING:
        out.append(_quote(v._data))
    elif k == Kind.ARRAY:
        _dump_array(v._data, out, path, indent, level)
    elif k == Kind.OBJECT:
        _dump_object(v._data, out, path, indent, level)
    elif k == Kind.INSTANCE and v.class_def is not None and v.class_def.dynamic:
        _dump_object(v._data, out, path, indent, level)
    else:
        raise SerializeError(f"{k.name} value at {path} is not JSON-serializable",
                             path=path)


def _dump_array(items, out, path, indent, level):
    if not items:
        out.append("[]")
        return
    open_, close, sep, pad = _frame("[", "]", indent, level)
    out.append(open_)
    for i, e in enumerate(items):
        if i:
            out.append(sep)
        out.append(pad)
        _dump(e, out, f"{path}[{i}]", indent, level + 1)
    out.append(close)


def _dump_object(mapping, out, path, indent, level):
    if not mapping:
        out.append("{}")
        return
    open_, close, sep, pad = _frame("{", "}", indent, level)
    out.append(open_)
    first = True
    for key, e in mapping.items():
        if not first:
            out.append(sep)
        first = False
        out.append(pad)
        out.append(_quote(key))
        out.append(": " if indent is not None else ":")
        _dump(e, out, f"{path}.{key}", indent, level + 1)
    out.append(close)


def _frame(open_, close, indent, level):
    if indent is None:
        return open_, close, ",", ""
    pad = "\n" + " " * (indent * (level + 1))
    closing = "\n" + " " * (indent * level) + close
    return open_, closing, ",", pad
