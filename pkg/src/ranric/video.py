"""DASH-style video client model: media buffer, playout and stall accounting.

The client fetches fixed-bitrate 2 s segments (one in flight at a time)
into a 6 s media buffer and plays them out at 24 fps, with a frame
boundary every 40 ms.  Dropping below 2 s of buffered media is a stall;
the stall lasts until the buffer refills above 2 s.  The buffer is kept in
whole frames internally so the dynamics are exact integer arithmetic.

At every frame boundary the client emits its media-buffer level, which
reaches the controller after a configurable uplink delay (conflated,
latest value wins) for cross-layer scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

from .delay import TtiDelayLine

DEFAULT_UPLINK_DELAY_MS = 20


@dataclass(frozen=True)
class AppStateMsg:
    rnti: int
    media_buffer_s: float
    tti: int


class VideoSession:
    segment_s = 2
    buffer_cap_s = 6
    fps = 24
    frame_period_ms = 40   # the source material's own frame cadence

    def __init__(self, rnti: int, bitrate_bps: int, start_buffer_s: float = 0.0):
        self.rnti = rnti
        self.bitrate_bps = int(bitrate_bps)
        self.segment_bytes = self.bitrate_bps * self.segment_s // 8
        self.segment_frames = self.segment_s * self.fps
        self.cap_frames = self.buffer_cap_s * self.fps
        self.threshold_frames = 2 * self.fps

        self.buffer_frames = int(round(start_buffer_s * self.fps))
        self.playing = self.buffer_frames >= self.threshold_frames
        self.stall_active = False
        self.stall_total_ms = 0
        self.pending_segment_bytes = 0
        self._in_flight = False
        self.segments_completed = 0
        self.stall_events = 0

    @property
    def media_buffer_s(self) -> float:
        return self.buffer_frames / self.fps

    @property
    def stall_total_s(self) -> float:
        return self.stall_total_ms / 1000.0

    def request_segment(self) -> int:
        """Bytes of the next segment to enqueue, or 0 if none is due."""
        if self._in_flight:
            return 0
        if self.buffer_frames + self.segment_frames > self.cap_frames:
            return 0
        self.pending_segment_bytes = self.segment_bytes
        self._in_flight = True
        return self.segment_bytes


def video_step(session: VideoSession, delivered_bytes: int, tti: int):
    """Advance one TTI; returns an AppStateMsg at frame boundaries else None.

    ``delivered_bytes`` is what the scheduler dequeued for this UE in this
    TTI; it can only be segment bytes, so it never exceeds the in-flight
    remainder.
    """
    if delivered_bytes:
        session.pending_segment_bytes -= delivered_bytes
        if session.pending_segment_bytes < 0:
            raise ValueError("delivered more than the in-flight segment")
        if session._in_flight and session.pending_segment_bytes == 0:
            session._in_flight = False
            session.segments_completed += 1
            session.buffer_frames = min(
                session.cap_frames, session.buffer_frames + session.segment_frames
            )

    msg = None
    if tti % session.frame_period_ms == 0:
        if session.stall_active and session.buffer_frames > session.threshold_frames:
            session.stall_active = False
        if not session.playing and session.buffer_frames >= session.threshold_frames:
            session.playing = True
        if session.playing and not session.stall_active:
            session.buffer_frames = max(0, session.buffer_frames - 1)
            if session.buffer_frames < session.threshold_frames:
                session.stall_active = True
                session.stall_events += 1
        msg = AppStateMsg(session.rnti, session.media_buffer_s, tti)

    if session.stall_active:
        session.stall_total_ms += 1
    return msg


class AppStateUplink:
    """Delivers AppStateMsg values to the controller after the uplink delay."""

    def __init__(self, uplink_delay_ms: int = DEFAULT_UPLINK_DELAY_MS):
        self._lines: dict[int, TtiDelayLine] = {}
        self.delay_ms = uplink_delay_ms
        self._latest: dict[int, float] = {}

    def publish(self, msg: AppStateMsg, now_tti: int):
        line = self._lines.setdefault(msg.rnti, TtiDelayLine(self.delay_ms))
        line.publish(msg, now_tti)

    def visible_buffers(self, now_tti: int) -> dict[int, float]:
        """rnti -> last media-buffer seconds visible at now_tti."""
        for rnti, line in self._lines.items():
            msg = line.poll(now_tti)
            if msg is not None:
                self._latest[rnti] = msg.media_buffer_s
        return dict(self._latest)
