"""ctypes declaration of the version-1 plugin entry table.

The table layout mirrors the published ABI byte for byte; field order
is load-bearing.  Handles are opaque uint64 tokens, 0 meaning absent.
"""
import ctypes as C

u8p = C.POINTER(C.c_uint8)
u64 = C.c_uint64
u64p = C.POINTER(C.c_uint64)
charp = C.POINTER(C.c_char)      # writable, unlike c_char_p

# kind ids, frozen within ABI v1
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

FN_ABI_VERSION = C.CFUNCTYPE(C.c_uint32)
FN_MODULE_ROOT = C.CFUNCTYPE(u64)
FN_VALUE_KIND = C.CFUNCTYPE(C.c_int32, u64)
FN_VALUE_CLONE = C.CFUNCTYPE(u64, u64)
FN_VALUE_RELEASE = C.CFUNCTYPE(None, u64)
FN_VALUE_INT = C.CFUNCTYPE(C.c_int64, u64)
FN_VALUE_REAL = C.CFUNCTYPE(C.c_double, u64)
FN_VALUE_STRING = C.CFUNCTYPE(u64, u64, charp, u64)
FN_VALUE_BUFFER = C.CFUNCTYPE(u64, u64, charp, u64p, u64, u64p, u8p, u64)
FN_ARRAY_SIZE = C.CFUNCTYPE(u64, u64)
FN_ARRAY_GET = C.CFUNCTYPE(u64, u64, u64)
FN_OBJECT_KEYS = C.CFUNCTYPE(u64, u64)
FN_OBJECT_GET = C.CFUNCTYPE(u64, u64, C.c_char_p)
FN_OBJECT_SET = C.CFUNCTYPE(C.c_int32, u64, C.c_char_p, u64)
FN_CALL = C.CFUNCTYPE(C.c_int32, u64, u64, u64p, u64,
                      C.POINTER(C.c_char_p), u64p, u64p, u64p)
FN_DESCRIBE = C.CFUNCTYPE(u64, u64)


class SvarEntryTable(C.Structure):
    _fields_ = [
        ("abi_version", FN_ABI_VERSION),
        ("module_root", FN_MODULE_ROOT),
        ("value_kind", FN_VALUE_KIND),
        ("value_clone", FN_VALUE_CLONE),
        ("value_release", FN_VALUE_RELEASE),
        ("value_int", FN_VALUE_INT),
        ("value_real", FN_VALUE_REAL),
        ("value_string", FN_VALUE_STRING),
        ("value_buffer", FN_VALUE_BUFFER),
        ("array_size", FN_ARRAY_SIZE),
        ("array_get", FN_ARRAY_GET),
        ("object_keys", FN_OBJECT_KEYS),
        ("object_get", FN_OBJECT_GET),
        ("object_set", FN_OBJECT_SET),
        ("call", FN_CALL),
        ("describe", FN_DESCRIBE),
    ]


ENTRY_SYMBOL = "svar_module_entry_v1"
