"""Scheduling policies hosted by the realtime controller.

Every policy maps a per-TTI RAN report (optionally augmented with delayed
application state) to a per-UE weight map; the RAN allocates RBs in
proportion to those weights.  Classical policies:

* CQI-fair:            w_i = CQI_i
* proportional fair:   w_i = CQI_i / AvgCQI_i   (EWMA average)
* max-weight:          w_i = CQI_i * B_i        (backlog in bytes)

plus a fixed equal-weight baseline and a neural policy that runs a
forward pass of a loaded MLP and softmaxes the outputs into weights.

``ric_loop`` is the controller main loop for the two-process realtime
mode: blocking-subscribe to reports, resolve TTI sync, compute, publish.
"""

from __future__ import annotations

import logging
import queue as queue_mod
from dataclasses import dataclass

import numpy as np

from .delay import TtiDelayLine
from .mlp import LAYOUT_VIDEO, PolicyNetwork
from .rt_e2 import (
    ChannelClosed,
    PolicyMsg,
    ReportMsg,
    SyncAction,
    SyncState,
    publish_policy,
    subscribe_report_blocking,
    sync_step,
)

log = logging.getLogger(__name__)

DEFAULT_EWMA_ALPHA = 0.01
NEUTRAL_MEDIA_BUFFER = 1.0   # normalized value used before any app feedback


def weights_cqi_fair(report: ReportMsg) -> dict:
    return {u.rnti: float(u.cqi) for u in report.ues}


class UeAverages:
    """Per-UE EWMA of CQI; first observation initializes the average."""

    def __init__(self, alpha: float = DEFAULT_EWMA_ALPHA):
        if not (0 < alpha <= 1):
            raise ValueError("alpha must be in (0, 1]")
        self.alpha = alpha
        self.avg = {}

    def update(self, rnti: int, cqi: int) -> float:
        prev = self.avg.get(rnti)
        cur = float(cqi) if prev is None else (1 - self.alpha) * prev + self.alpha * cqi
        self.avg[rnti] = cur
        return cur


def weights_prop_fair(report: ReportMsg, avgs: UeAverages) -> dict:
    out = {}
    for u in report.ues:
        avg = avgs.update(u.rnti, u.cqi)
        out[u.rnti] = u.cqi / avg
    return out


def weights_max_weight(report: ReportMsg) -> dict:
    return {u.rnti: float(u.cqi) * u.backlog_bytes for u in report.ues}


def softmax(x: np.ndarray) -> np.ndarray:
    z = np.exp(x - np.max(x))
    return z / z.sum()


def assemble_state(report: ReportMsg, net_layout: str, norm, app_buffers=None) -> np.ndarray:
    """Build the normalized state vector in rnti-ascending block order.

    Layout: [B_i / backlog_scale ...] + [CQI_i / cqi_scale ...] and, for
    the video task, + [MB_i / media_scale ...] with a neutral 1.0 for UEs
    that have not reported a media buffer yet.
    """
    ues = sorted(report.ues, key=lambda u: u.rnti)
    backlogs = [u.backlog_bytes / norm.backlog_scale for u in ues]
    cqis = [u.cqi / norm.cqi_scale for u in ues]
    state = backlogs + cqis
    if net_layout == LAYOUT_VIDEO:
        buffers = app_buffers or {}
        for u in ues:
            if u.rnti in buffers:
                state.append(buffers[u.rnti] / norm.media_scale)
            else:
                state.append(NEUTRAL_MEDIA_BUFFER)
    return np.asarray(state, dtype=np.float32)


def weights_neural(report: ReportMsg, net: PolicyNetwork, app_buffers=None) -> dict:
    if len(report.ues) != net.n_ues:
        raise ValueError(f"report has {len(report.ues)} UEs, network expects {net.n_ues}")
    state = assemble_state(report, net.state_layout, net.norm, app_buffers)
    logits = net.forward(state)
    w = softmax(logits)
    rntis = sorted(u.rnti for u in report.ues)
    return {rnti: float(w[i]) for i, rnti in enumerate(rntis)}


# ---------------------------------------------------------------------------
# policy objects (hot-swappable inside the controller loop)

class CqiFairPolicy:
    name = "cqi_fair"

    def compute(self, report, app_buffers=None):
        return weights_cqi_fair(report)


class PropFairPolicy:
    name = "prop_fair"

    def __init__(self, ewma_alpha: float = DEFAULT_EWMA_ALPHA):
        self.avgs = UeAverages(ewma_alpha)

    def compute(self, report, app_buffers=None):
        return weights_prop_fair(report, self.avgs)


class MaxWeightPolicy:
    name = "max_weight"

    def compute(self, report, app_buffers=None):
        return weights_max_weight(report)


class FixedEqualPolicy:
    name = "fixed_equal"

    def compute(self, report, app_buffers=None):
        return {u.rnti: 1.0 for u in report.ues}


class NeuralPolicy:
    name = "neural"

    def __init__(self, net: PolicyNetwork):
        self.net = net

    def compute(self, report, app_buffers=None):
        return weights_neural(report, self.net, app_buffers)


def policy_to_msg(report: ReportMsg, weights: dict) -> PolicyMsg:
    """Wrap computed weights, substituting an equal split if all are zero."""
    if weights and all(w == 0 for w in weights.values()):
        weights = {r: 1.0 for r in weights}
    return PolicyMsg(ric_time=report.ran_time, weights=weights)


@dataclass
class DelayLineConfig:
    """Symmetric one-way report/policy delay emulating a cloud controller."""
    one_way_delay_ttis: int = 0


def delay_line(cfg: DelayLineConfig):
    """(report line, policy line) pair with the configured one-way delay."""
    return TtiDelayLine(cfg.one_way_delay_ttis), TtiDelayLine(cfg.one_way_delay_ttis)


def ric_loop(report_ch, policy_ch, policy, sync: SyncState | None = None,
             mailbox=None, max_reports=None, idle_timeout=5.0,
             compute_hook=None):
    """Controller main loop: subscribe, sync, compute, publish.

    ``mailbox`` (a queue.Queue) may deliver a replacement policy object
    between TTIs for runtime reconfiguration.  Returns the final SyncState
    when the report channel closes, the peer goes idle for
    ``idle_timeout`` seconds, or ``max_reports`` have been handled.
    """
    sync = sync or SyncState()
    handled = 0
    while max_reports is None or handled < max_reports:
        if mailbox is not None:
            try:
                policy = mailbox.get_nowait()
            except queue_mod.Empty:
                pass
        try:
            report = subscribe_report_blocking(report_ch, timeout=idle_timeout)
        except ChannelClosed:
            break
        if report is None:       # peer idle; treat as shutdown
            break
        action = sync_step(sync, report.ran_time)
        if action is SyncAction.PAUSE_RIC:
            continue             # wait for the RAN clock to catch up
        if compute_hook is not None:
            compute_hook()
        weights = policy.compute(report)
        try:
            publish_policy(policy_ch, policy_to_msg(report, weights))
        except ChannelClosed:
            break
        sync.ric_time = report.ran_time + 1
        handled += 1
    return sync
