"""Traffic sources: constant-bit-rate arrivals and video segment pushes."""

import pytest

from ranric.traffic import CbrSource, VideoServerSource
from ranric.video import VideoSession


def test_cbr_35mbps_exact_over_ten_seconds():
    src = CbrSource(35_000_000)
    total = sum(src.arrivals(t) for t in range(10_000))
    assert abs(total - 43_750_000) <= 1   # 35e6/8 B/s x 10 s


def test_cbr_zero_rate():
    src = CbrSource(0)
    assert all(src.arrivals(t) == 0 for t in range(1000))


@pytest.mark.parametrize("rate_bps", [1, 999, 8000, 17_500_000, 35_000_001])
def test_cbr_long_run_average_byte_exact(rate_bps):
    src = CbrSource(rate_bps)
    n = 100_000
    total = sum(src.arrivals(t) for t in range(n))
    assert abs(total - rate_bps * n / 8000) <= 1


def test_cbr_per_tti_jitter_below_one_byte():
    src = CbrSource(17_500_000)
    per_tti = 17_500_000 / 8000
    acc = 0
    for t in range(10_000):
        acc += src.arrivals(t)
        assert abs(acc - per_tti * (t + 1)) < 1


def test_cbr_rejects_negative_rate():
    with pytest.raises(ValueError):
        CbrSource(-1)


def test_video_server_pushes_one_segment_then_waits():
    session = VideoSession(1, 6_000_000)
    src = VideoServerSource(session)
    assert src.arrivals(0) == session.segment_bytes
    assert src.arrivals(1) == 0     # previous segment still in flight
