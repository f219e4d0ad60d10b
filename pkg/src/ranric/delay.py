"""TTI-indexed delay line with depth-1 conflation.

Used to emulate a cloud-hosted controller (reports and policies each
delayed by a fixed number of TTIs) and the uplink latency of application
state feedback.  A payload published at TTI t becomes visible at t+delay;
a poll returns only the newest visible payload, older ones are discarded.
"""

from __future__ import annotations

from collections import deque


class TtiDelayLine:
    def __init__(self, delay_ttis: int):
        if delay_ttis < 0:
            raise ValueError("delay must be >= 0")
        self.delay_ttis = delay_ttis
        self._pending = deque()   # (visible_tti, payload)

    def publish(self, payload, now_tti: int):
        self._pending.append((now_tti + self.delay_ttis, payload))

    def poll(self, now_tti: int):
        """Newest payload visible at now_tti, or None."""
        latest = None
        while self._pending and self._pending[0][0] <= now_tti:
            latest = self._pending.popleft()[1]
        return latest
