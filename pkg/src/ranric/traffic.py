"""Downlink traffic sources feeding the per-UE queues.

``CbrSource`` models an iPerf-style constant-bit-rate loader with a
fractional-bit accumulator so the long-run average is byte-exact.
``VideoServerSource`` pushes DASH-style segments for a video session,
one segment in flight at a time.
"""

from __future__ import annotations


class CbrSource:
    """Constant bit rate arrivals, byte-exact over time."""

    def __init__(self, rate_bps: int):
        if rate_bps < 0:
            raise ValueError("rate must be >= 0")
        self.rate_bps = int(rate_bps)
        self._acc_bits = 0

    def arrivals(self, tti: int) -> int:
        # one TTI carries rate_bps/1000 bits; carry the remainder forward
        self._acc_bits += self.rate_bps
        nbytes = self._acc_bits // 8000
        self._acc_bits -= nbytes * 8000
        return nbytes


class VideoServerSource:
    """Enqueues the next video segment whenever the session requests one."""

    def __init__(self, session):
        self.session = session

    def arrivals(self, tti: int) -> int:
        return self.session.request_segment()
