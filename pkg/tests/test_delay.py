"""TTI-indexed delay line used to emulate cloud controller placement."""

from ranric.delay import TtiDelayLine

import pytest


def test_zero_delay_behaves_like_direct_channel():
    line = TtiDelayLine(0)
    line.publish("a", 5)
    assert line.poll(5) == "a"
    assert line.poll(5) is None


def test_visible_exactly_after_delay():
    line = TtiDelayLine(15)
    line.publish("report", 100)
    assert line.poll(114) is None
    assert line.poll(115) == "report"


def test_poll_conflates_to_newest_visible():
    line = TtiDelayLine(3)
    line.publish("old", 0)
    line.publish("new", 1)
    assert line.poll(10) == "new"
    assert line.poll(10) is None


def test_in_order_delivery_when_polled_every_tti():
    line = TtiDelayLine(2)
    for t in range(10):
        line.publish(t, t)
        got = line.poll(t)
        if t >= 2:
            assert got == t - 2
        else:
            assert got is None


def test_negative_delay_rejected():
    with pytest.raises(ValueError):
        TtiDelayLine(-1)
