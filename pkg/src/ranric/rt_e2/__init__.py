"""Realtime RAN <-> RIC exchange: messages, channels and TTI sync.

The operations below bind the wire encoding to a channel, giving the four
verbs both sides use each TTI: the RAN publishes a state report and polls
for control without blocking; the RIC blocks on reports and publishes
weight policies.
"""

from .messages import (
    CQI_MAX,
    CQI_MIN,
    PolicyMsg,
    ReportMsg,
    UeReport,
    WireError,
    decode_policy,
    decode_report,
    encode_policy,
    encode_report,
)
from .channels import ChannelClosed, InProcChannel, UdpPublisher, UdpSubscriber
from .sync import SyncAction, SyncState, sync_step


def publish_report(channel, msg: ReportMsg):
    channel.publish(encode_report(msg))


def subscribe_report_blocking(channel, timeout=None):
    """Return the latest unread report, blocking until one exists.

    Returns None on timeout; raises ChannelClosed if the channel is gone.
    """
    payload = channel.recv(timeout)
    return None if payload is None else decode_report(payload)


def publish_policy(channel, msg: PolicyMsg):
    channel.publish(encode_policy(msg))


def poll_policy_nonblocking(channel):
    """Return the latest unread policy or None, without blocking."""
    payload = channel.poll()
    return None if payload is None else decode_policy(payload)


__all__ = [
    "CQI_MAX",
    "CQI_MIN",
    "ChannelClosed",
    "InProcChannel",
    "PolicyMsg",
    "ReportMsg",
    "SyncAction",
    "SyncState",
    "UdpPublisher",
    "UdpSubscriber",
    "UeReport",
    "WireError",
    "decode_policy",
    "decode_report",
    "encode_policy",
    "encode_report",
    "poll_policy_nonblocking",
    "publish_policy",
    "publish_report",
    "subscribe_report_blocking",
    "sync_step",
]
