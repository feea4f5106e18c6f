"""In-process publish/subscribe with per-subscription queue policies.

Capacity 0 runs the callback synchronously on the publisher's thread
and hands over the producer's Value itself (zero copy).  A positive
capacity gives the subscription its own worker thread and a bounded
queue that drops the oldest entry on overflow.  Dropping the
subscription token (or calling `unsubscribe`) deactivates delivery;
callback exceptions are logged and never reach the publisher.
"""

import collections
import inspect
import logging
import threading
import weakref

from .errors import ArityError
from .functions import FunctionDef
from .value import Kind, Value

log = logging.getLogger(__name__)


def _check_arity(cb):
    if isinstance(cb, Value):
        if cb.kind != Kind.FUNCTION:
            raise ArityError(f"callback must be callable, got {cb.kind.name}")
        return cb._data
    if isinstance(cb, FunctionDef):
        return cb
    if not callable(cb):
        raise ArityError(f"callback must be callable, got {type(cb).__name__}")
    try:
        sig = inspect.signature(cb)
    except (ValueError, TypeError):
        return cb
    required = 0
    maximum = 0
    for p in sig.parameters.values():
        if p.kind in (p.VAR_POSITIONAL, p.VAR_KEYWORD):
            maximum = None
            continue
        maximum = maximum + 1 if maximum is not None else None
        if p.default is sig.empty and p.kind != p.KEYWORD_ONLY:
            required += 1
    if required > 1 or (maximum is not None and maximum < 1):
        raise ArityError(
            f"callback {getattr(cb, '__name__', cb)!r} must accept exactly "
            "one positional argument")
    return cb


def _deliver(cb, value):
    try:
        if isinstance(cb, FunctionDef):
            cb.invoke([value], {})
        else:
            cb(value)
    except Exception:
        log.exception("subscriber callback raised; message dropped")


class _Channel:
    # shared between a Subscription and its worker thread; keeping it
    # separate lets the token be garbage collected while the worker
    # still holds what it needs to shut down
    __slots__ = ("queue", "cv", "closed", "callback", "capacity", "dropped")

    def __init__(self, capacity, callback):
        self.queue = collections.deque()
        self.cv = threading.Condition()
        self.closed = False
        self.callback = callback
        self.capacity = capacity
        self.dropped = 0

    def push(self, value):
        with self.cv:
            if self.closed:
                return False
            if len(self.queue) >= self.capacity:
                self.queue.popleft()  # overflow: oldest goes first
                self.dropped += 1
            self.queue.append(value)
            self.cv.notify()
        return True

    def close(self):
        with self.cv:
            self.closed = True
            self.cv.notify()

    def run(self):
        while True:
            with self.cv:
                while not self.queue and not self.closed:
                    self.cv.wait()
                if self.closed:
                    return
                value = self.queue.popleft()
            _deliver(self.callback, value)


class Subscription:
    """Token returned by `Messenger.subscribe`; keep it to stay subscribed."""

    __slots__ = ("topic", "capacity", "_callback", "_channel", "_thread",
                 "_finalizer", "_closed", "__weakref__")

    def __init__(self, topic, capacity, callback):
        if not isinstance(capacity, int) or capacity < 0:
            raise ArityError("capacity must be a non-negative integer")
        self.topic = topic
        self.capacity = capacity
        self._callback = _check_arity(callback)
        self._channel = None
        self._thread = None
        self._closed = False
        if capacity > 0:
            ch = _Channel(capacity, self._callback)
            self._channel = ch
            self._thread = threading.Thread(
                target=ch.run, name=f"sub-{topic}", daemon=True)
            self._thread.start()
            self._finalizer = weakref.finalize(self, ch.close)
        else:
            self._finalizer = None

    @property
    def active(self):
        if self._closed:
            return False
        if self._channel is not None:
            return not self._channel.closed
        return True

    @property
    def dropped(self):
        """Messages displaced by overflow so far."""
        return self._channel.dropped if self._channel is not None else 0

    def close(self):
        self._closed = True
        if self._finalizer is not None:
            self._finalizer()

    def _receive(self, value):
        if self._closed:
            return False
        if self._channel is not None:
            return self._channel.push(value)
        _deliver(self._callback, value)
        return True

    def __repr__(self):
        return f"<Subscription {self.topic!r} capacity={self.capacity}>"


class Messenger:
    """Topic-keyed bus.  Thread-safe."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subs = {}

    def subscribe(self, topic, capacity, callback):
        """Register `callback` for `topic`; returns the Subscription token.

        The registration is weak: once the token is no longer referenced,
        delivery stops.
        """
        if not isinstance(topic, str) or not topic:
            raise ArityError("topic must be a non-empty string")
        sub = Subscription(topic, capacity, callback)
        with self._lock:
            self._subs.setdefault(topic, []).append(weakref.ref(sub))
        return sub

    def publish(self, topic, value):
        """Hand `value` to every live subscription of `topic`.

        Returns the number of subscriptions that accepted the message.
        The value travels as the same object the caller passed (wrapped
        once if it was not a Value).
        """
        if not isinstance(value, Value):
            value = Value(value)
        with self._lock:
            refs = list(self._subs.get(topic, ()))
        delivered = 0
        gone = []
        for ref in refs:
            sub = ref()
            if sub is None or not sub.active:
                gone.append(ref)
                continue
            if sub._receive(value):
                delivered += 1
        if gone:
            with self._lock:
                live = [r for r in self._subs.get(topic, ()) if r not in gone]
                if live:
                    self._subs[topic] = live
                else:
                    self._subs.pop(topic, None)
        return delivered

    def unsubscribe(self, sub):
        """Deactivate a subscription token."""
        sub.close()
        with self._lock:
            refs = self._subs.get(sub.topic)
            if refs:
                refs[:] = [r for r in refs if r() is not sub]
                if not refs:
                    self._subs.pop(sub.topic, None)

    def topics(self):
        with self._lock:
            return sorted(t for t, refs in self._subs.items()
                          if any(r() is not None for r in refs))
