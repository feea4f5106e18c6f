"""Bridge Svar ABI plugins into Python.

    import svarbridge
    hello = svarbridge.load("hello")
    hello.say("hello world")
    hello.Person("me").intro()

The loaded module's functions are callables, its classes construct
proxied instances, and its scalars are plain Python values.  Nothing
here depends on the plugin's implementation language or on any
particular host runtime; the only shared contract is the C entry
table.
"""
from ._bridge import (
    AbiError,
    BridgedClass,
    BridgedFunction,
    BridgedInstance,
    BridgedModule,
    LossyConversionWarning,
    PluginError,
    from_host,
    load,
    to_host,
)

__all__ = [
    "AbiError", "BridgedClass", "BridgedFunction", "BridgedInstance",
    "BridgedModule", "LossyConversionWarning", "PluginError",
    "from_host", "load", "to_host",
]
