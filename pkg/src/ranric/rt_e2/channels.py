"""Conflating pub/sub channels for the RAN <-> RIC exchange.

Semantics shared by every implementation:

* depth-1 conflation: an unread message is replaced by the next publish,
  so a subscriber only ever sees the latest value;
* the publisher never blocks, whether or not a subscriber exists;
* the subscriber may read blocking (``recv``) or non-blocking (``poll``).

Two transports are provided: ``InProcChannel`` for single-process runs and
tests, and a UDP-socket pair (``UdpPublisher`` / ``UdpSubscriber``) for the
two-process realtime mode.  Payloads are opaque byte strings; encoding
lives in :mod:`ranric.rt_e2.messages`.
"""

from __future__ import annotations

import errno
import select
import socket
import struct
import threading

# SO_TIMESTAMPNS on linux/x86-64; socket module may not export it
_SO_TIMESTAMPNS = getattr(socket, "SO_TIMESTAMPNS", 35)


class ChannelClosed(Exception):
    """The channel was closed; no further messages will be delivered."""


class InProcChannel:
    """Single-slot conflating channel between two threads."""

    def __init__(self):
        self._cond = threading.Condition()
        self._slot = None
        self._closed = False

    def publish(self, payload: bytes):
        with self._cond:
            if self._closed:
                raise ChannelClosed
            self._slot = payload
            self._cond.notify()

    def poll(self):
        """Return the latest unread payload, or None if there is none."""
        with self._cond:
            if self._closed and self._slot is None:
                raise ChannelClosed
            payload, self._slot = self._slot, None
            return payload

    def recv(self, timeout=None):
        """Block until a payload arrives; None on timeout."""
        with self._cond:
            while self._slot is None:
                if self._closed:
                    raise ChannelClosed
                if not self._cond.wait(timeout):
                    return None
            payload, self._slot = self._slot, None
            return payload

    def close(self):
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class UdpPublisher:
    """Fire-and-forget publishing endpoint.

    The socket is non-blocking: if the local send buffer is momentarily
    full the datagram is dropped, which conflation tolerates by design.
    """

    def __init__(self, addr):
        self._addr = addr
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setblocking(False)
        self._closed = False

    def publish(self, payload: bytes):
        if self._closed:
            raise ChannelClosed
        try:
            self._sock.sendto(payload, self._addr)
        except (BlockingIOError, ConnectionRefusedError):
            pass
        except OSError as e:
            if e.errno not in (errno.EAGAIN, errno.ECONNREFUSED):
                raise

    def close(self):
        self._closed = True
        self._sock.close()


class UdpSubscriber:
    """Receiving endpoint; drains the socket queue and keeps the latest.

    With ``timestamps=True`` the kernel stamps each datagram on arrival
    (CLOCK_REALTIME); after a successful ``recv``/``poll`` the stamp of the
    returned datagram is available as ``last_ts_s``.  This dates a message
    by when it reached the host rather than when the reader was scheduled.
    """

    def __init__(self, bind_addr, rcvbuf=1 << 20, timestamps=False):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, rcvbuf)
        self._timestamps = timestamps
        self.last_ts_s = None
        if timestamps:
            self._sock.setsockopt(socket.SOL_SOCKET, _SO_TIMESTAMPNS, 1)
        self._sock.bind(bind_addr)
        self._closed = False

    @property
    def addr(self):
        return self._sock.getsockname()

    def _recv_one(self):
        if not self._timestamps:
            return self._sock.recv(65535)
        data, ancdata, _, _ = self._sock.recvmsg(65535, 64)
        for level, kind, blob in ancdata:
            if level == socket.SOL_SOCKET and kind == _SO_TIMESTAMPNS:
                sec, nsec = struct.unpack("qq", blob[:16])
                self.last_ts_s = sec + nsec * 1e-9
        return data

    def _drain(self):
        latest = None
        while True:
            try:
                latest = self._recv_one()
            except BlockingIOError:
                return latest
            except OSError:
                if latest is not None:
                    return latest
                raise ChannelClosed from None

    def poll(self):
        if self._closed:
            raise ChannelClosed
        self._sock.setblocking(False)
        return self._drain()

    def recv(self, timeout=None):
        if self._closed:
            raise ChannelClosed
        self._sock.setblocking(False)
        latest = self._drain()
        if latest is not None:
            return latest
        # wait via select rather than a socket timeout: socket timeouts
        # round up to whole milliseconds, a full TTI of slack
        try:
            ready, _, _ = select.select([self._sock], [], [], timeout)
        except OSError:
            raise ChannelClosed from None
        if not ready:
            return None
        return self._drain()

    def close(self):
        self._closed = True
        self._sock.close()
