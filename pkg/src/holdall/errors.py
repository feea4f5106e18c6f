"""Exception hierarchy shared by every layer of the package.

Each class multiply inherits from the closest builtin so that callers can
catch either the library base (``Error``) or the idiomatic Python category
(``TypeError``, ``ValueError``, ...) without special-casing.
"""


class Error(Exception):
    """Base class for all errors raised by this package."""

    # short machine-readable tag, surfaced over the HTTP gateway
    kind = "Error"

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if "kind" not in cls.__dict__:
            cls.kind = cls.__name__


class CastError(Error, TypeError):
    """Extraction or conversion between value kinds failed."""


class RangeError(Error, IndexError):
    """Index outside the bounds of an array or buffer."""


class ParseError(Error, ValueError):
    """Malformed input text or bytes.

    `offset` is the position (character or byte) where decoding gave up.
    """

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class SerializeError(Error, ValueError):
    """Value cannot be represented in the target format.

    `path` names the offending node, e.g. ``$.rows[3].blob``.
    """

    def __init__(self, message, path="$"):
        super().__init__(message)
        self.path = path


class ArityError(Error, TypeError):
    """Parameter list and declaration disagree about argument count."""


class CallError(Error, TypeError):
    """No overload of a function accepted the supplied arguments.

    `failures` holds one human-readable line per rejected overload.
    """

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = list(failures or [])


class MemberError(Error, AttributeError):
    """Unknown attribute, method or property on an instance or class."""


class DefinitionError(Error, ValueError):
    """Invalid class, function or module definition."""


class PluginImportError(Error, ImportError):
    """Module could not be located or its shared object failed to load."""

    def __init__(self, message, tried=None):
        super().__init__(message)
        self.tried = list(tried or [])


class AbiError(Error, ImportError):
    """Plugin entry point missing, malformed or of an unsupported revision."""


class LifetimeError(Error, RuntimeError):
    """Use of a value whose owning plugin has been unloaded."""


class OwnershipError(Error, RuntimeError):
    """Second transfer of unique ownership out of a value."""


class UsageError(Error, RuntimeError):
    """API misuse: double unload, unload of in-process module, and similar."""


class IoError(Error, OSError):
    """File or socket level failure."""


class HttpError(Error, RuntimeError):
    """Non-2xx response from a remote gateway."""

    def __init__(self, status, body=""):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class NotFoundError(Error, LookupError):
    """Requested entry does not exist."""

    kind = "NotFound"


class LossyConversionWarning(UserWarning):
    """Integer did not fit the signed 64-bit payload and degraded to a real."""
