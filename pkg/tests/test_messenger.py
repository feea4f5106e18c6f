import threading
import time

import pytest

from holdall import Messenger, Value, wrap, ArityError


def wait_until(cond, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if cond():
            return True
        time.sleep(0.005)
    return False


def test_capacity_zero_is_synchronous_and_zero_copy():
    bus = Messenger()
    seen = []
    sub = bus.subscribe("t", 0, seen.append)
    payload = Value({"big": [1, 2, 3]})
    n = bus.publish("t", payload)
    assert n == 1
    assert seen and seen[0] is payload        # identity, not a copy


def test_publish_wraps_plain_objects_once():
    bus = Messenger()
    seen = []
    sub = bus.subscribe("t", 0, seen.append)
    bus.publish("t", {"a": 1})
    assert isinstance(seen[0], Value)
    assert seen[0].to_python() == {"a": 1}


def test_publish_counts_and_no_subscribers():
    bus = Messenger()
    assert bus.publish("nobody", 1) == 0
    keep = [bus.subscribe("t", 0, lambda v: None),
            bus.subscribe("t", 0, lambda v: None)]
    assert bus.publish("t", 1) == 2


def test_callback_arity_enforced():
    bus = Messenger()
    with pytest.raises(ArityError):
        bus.subscribe("t", 0, lambda: None)
    with pytest.raises(ArityError):
        bus.subscribe("t", 0, lambda a, b: None)
    sub = bus.subscribe("t", 0, lambda v, extra=1: None)
    assert sub.active


def test_function_def_callback():
    bus = Messenger()
    got = []
    fd = wrap(lambda v: got.append(v.to_python()), "v spec")
    sub = bus.subscribe("t", 0, fd)
    bus.publish("t", 42)
    assert got == [42]


def test_callback_exception_logged_not_raised(caplog):
    import logging
    bus = Messenger()
    sub = bus.subscribe("t", 0, lambda v: 1 / 0)
    with caplog.at_level(logging.ERROR, logger="holdall.messenger"):
        assert bus.publish("t", 1) == 1
    rec = next(r for r in caplog.records if "callback raised" in r.message)
    assert rec.exc_info[0] is ZeroDivisionError


def test_async_delivery_fifo_order():
    bus = Messenger()
    got = []
    done = threading.Event()
    N = 10_000

    def cb(v):
        got.append(v.to_python())
        if len(got) == N:
            done.set()

    sub = bus.subscribe("t", N, cb)
    for i in range(N):
        bus.publish("t", i)
    assert done.wait(20)
    assert got == list(range(N))


def test_overflow_drops_oldest_capacity_one():
    bus = Messenger()
    got = []
    gate = threading.Event()
    first_in = threading.Event()

    def cb(v):
        got.append(v.to_python())
        if len(got) == 1:
            first_in.set()
            gate.wait(10)

    sub = bus.subscribe("t", 1, cb)
    bus.publish("t", "m1")
    assert first_in.wait(5)       # worker busy inside m1's callback
    bus.publish("t", "m2")        # queued
    bus.publish("t", "m3")        # full: m2 dropped
    gate.set()
    assert wait_until(lambda: len(got) == 2)
    assert got == ["m1", "m3"]
    assert sub.dropped == 1


def test_unsubscribe_stops_delivery():
    bus = Messenger()
    got = []
    sub = bus.subscribe("t", 0, got.append)
    bus.publish("t", 1)
    bus.unsubscribe(sub)
    assert bus.publish("t", 2) == 0
    assert len(got) == 1
    assert not sub.active


def test_dropped_subscription_deactivates():
    import gc
    bus = Messenger()
    sub = bus.subscribe("t", 4, lambda v: None)
    assert bus.publish("t", 1) == 1
    del sub
    gc.collect()
    assert wait_until(lambda: bus.publish("t", 2) == 0)


def test_topics_listing():
    bus = Messenger()
    keep = [bus.subscribe("a", 0, lambda v: None),
            bus.subscribe("b", 0, lambda v: None)]
    assert set(bus.topics()) == {"a", "b"}


def test_distinct_topics_do_not_cross():
    bus = Messenger()
    got = []
    sub = bus.subscribe("a", 0, got.append)
    bus.publish("b", 1)
    assert got == []
