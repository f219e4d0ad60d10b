"""Two-process realtime mode: RAN paced at 1 ms TTIs, controller in its
own OS process, UDP channels in between.

The RAN never blocks past a TTI boundary: after publishing its report it
waits for the matching policy only until just before the deadline, then
moves on (late or missing policies leave the previous weights in force).
Because the wait happens inside otherwise-idle TTI time, it doubles as
the round-trip latency probe: RTT = policy arrival - report publish, and
a decision "lands in its issuing TTI" when the policy answering report t
arrives before TTI t ends.
"""

from __future__ import annotations

import ctypes
import gc
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field

from .metrics import MetricsLog
from .policies import FixedEqualPolicy, ric_loop
from .ran import RanEmulator
from .rt_e2 import (
    ReportMsg,
    UdpPublisher,
    UdpSubscriber,
    UeReport,
    decode_policy,
    encode_report,
)
from .runner import build_emulator, build_policy
from .scenario import ScenarioConfig, socket_base_port

TTI_S = 1e-3

# priorities: the controller outranks the RAN pacer on purpose -- it is
# event-driven and brief, so it preempts the spinning RAN the instant a
# report lands and hands the CPU straight back
RAN_PRIORITY = 50
RIC_PRIORITY = 60

# fair-class bandwidth reservation while a realtime loop hogs the CPU:
# zero runtime parks the kernel's consolation mechanism for the duration
# of a run -- its default grant is a 50 ms block that flattens 50 TTIs in
# a row, and sub-TTI grants measured worse because the replenishment
# timers themselves arrive late on this host
_FAIR_SERVER_DIR = "/sys/kernel/debug/sched/fair_server"
_FAIR_RUNTIME_NS = 0
_FAIR_PERIOD_NS = 1_000_000_000


def _pace_to(deadline: float):
    """Hold the TTI boundary to a few microseconds by polling the clock.

    Timer-based sleeps on a contended virtualized host routinely wake
    hundreds of microseconds late (the timer interrupt has to travel
    through the busy hypervisor), and an idle guest gets its CPU parked,
    which costs milliseconds to undo.  Clock reads are serviced by the
    TSC without leaving the guest, so burning the idle time polling is
    the only pacing that holds 1 ms here.
    """
    while time.monotonic() < deadline:
        pass


def _tune_fair_server():
    """Park the fair-class consolation server; returns an undo callable.

    Best effort: silently does nothing where the knobs are absent or not
    writable.  Writing runtime before period keeps runtime <= period at
    every intermediate state.
    """
    saved = []
    try:
        for cpu in sorted(os.listdir(_FAIR_SERVER_DIR)):
            d = os.path.join(_FAIR_SERVER_DIR, cpu)
            vals = {}
            for knob in ("runtime", "period"):
                with open(os.path.join(d, knob)) as f:
                    vals[knob] = f.read().strip()
            for knob, val in (("runtime", _FAIR_RUNTIME_NS),
                              ("period", _FAIR_PERIOD_NS)):
                with open(os.path.join(d, knob), "w") as f:
                    f.write(str(val))
            saved.append((d, vals))
    except OSError:
        pass

    def undo():
        for d, vals in saved:
            try:
                for knob in ("period", "runtime"):
                    with open(os.path.join(d, knob), "w") as f:
                        f.write(vals[knob])
            except OSError:
                pass

    return undo


def _realtime_minus_monotonic() -> float:
    """Offset translating kernel CLOCK_REALTIME stamps onto the loop clock.

    Median over repeated paired reads; preemption between a pair inflates
    single samples but not the median.
    """
    samples = sorted(time.clock_gettime(time.CLOCK_REALTIME) - time.monotonic()
                     for _ in range(65))
    return samples[32]


def _enter_realtime(priority: int):
    """Best-effort latency hardening for a TTI-paced process.

    Collector pauses and scheduler preemption are the two multi-millisecond
    hazards on a busy general-purpose host; disable the first and, where
    permitted, escape the second with a realtime scheduling class.  Both are
    optional -- the loop stays correct without them, just with more jitter.
    Returns a callable restoring the collector for the host process.
    """
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        os.sched_setscheduler(0, os.SCHED_FIFO, os.sched_param(priority))
    except (PermissionError, OSError, AttributeError):
        try:
            os.nice(-10)
        except OSError:
            pass
    try:
        # pin every mapped page: a reclaimed code page costs a disk read
        # at an arbitrary point of the loop (MCL_CURRENT | MCL_FUTURE)
        ctypes.CDLL("libc.so.6", use_errno=True).mlockall(3)
    except OSError:
        pass

    def restore():
        if was_enabled:
            gc.enable()

    return restore


@dataclass
class RealtimeResult:
    metrics: MetricsLog
    rtts_s: list = field(default_factory=list)   # matched-policy round trips
    decisions_in_tti: int = 0
    n_ttis: int = 0
    deadline_overruns: int = 0
    ric_sync: object = None                      # SyncState from the RIC process

    @property
    def in_tti_fraction(self) -> float:
        return self.decisions_in_tti / self.n_ttis if self.n_ttis else 0.0

    def median_rtt_us(self) -> float:
        if not self.rtts_s:
            return float("inf")
        xs = sorted(self.rtts_s)
        return xs[len(xs) // 2] * 1e6


def _ric_process(report_port, policy_port, config: ScenarioConfig | None,
                 stats_q, slow_s: float):
    _enter_realtime(priority=RIC_PRIORITY)
    report_sub = UdpSubscriber(("127.0.0.1", report_port))
    policy_pub = UdpPublisher(("127.0.0.1", policy_port))
    policy = build_policy(config) if config is not None else FixedEqualPolicy()
    hook = (lambda: time.sleep(slow_s)) if slow_s > 0 else None
    stats_q.put("ready")   # sockets bound, policy built: safe to start pacing
    sync = ric_loop(report_sub, policy_pub, policy, idle_timeout=2.0,
                    compute_hook=hook)
    stats_q.put((sync.ran_time, sync.ric_time, sync.lazy_ran_events,
                 sync.lazy_ric_events))
    report_sub.close()
    policy_pub.close()


def run_realtime(config: ScenarioConfig, kill_ric_after=None, ric_slow_ms=0.0,
                 base_port=None) -> RealtimeResult:
    """Run a scenario with the controller in a separate process.

    kill_ric_after: TTI index at which the RIC process is terminated (the
    RAN must keep meeting its TTIs with fallback weights).
    """
    base_port = base_port if base_port is not None else socket_base_port()
    report_port, policy_port = base_port, base_port + 1

    ctx = mp.get_context("spawn")
    stats_q = ctx.Queue()
    proc = ctx.Process(
        target=_ric_process,
        args=(report_port, policy_port, config, stats_q, ric_slow_ms / 1e3),
        daemon=True,
    )
    proc.start()
    # wait for the controller to finish importing and bind its sockets;
    # once the RAN starts spinning at realtime priority the child would
    # only see scraps of this single-CPU host
    stats_q.get(timeout=30.0)

    emu = build_emulator(config)
    undo_tuning = _tune_fair_server()
    try:
        result = _ran_loop(emu, config.duration_ttis, report_port, policy_port,
                           kill_ric_after, proc)
    finally:
        undo_tuning()
    if proc.is_alive():
        try:
            result.ric_sync = stats_q.get(timeout=5.0)
        except Exception:
            result.ric_sync = None
        proc.join(timeout=2.0)
    if proc.is_alive():
        proc.terminate()
    return result


def _ran_loop(emu: RanEmulator, duration, report_port, policy_port,
              kill_ric_after, ric_proc) -> RealtimeResult:
    restore = _enter_realtime(priority=RAN_PRIORITY)
    report_pub = UdpPublisher(("127.0.0.1", report_port))
    policy_sub = UdpSubscriber(("127.0.0.1", policy_port), timestamps=True)
    metrics = MetricsLog([u.rnti for u in emu.ues], duration)
    result = RealtimeResult(metrics=metrics, n_ttis=duration)
    pending = None
    ts_offset = _realtime_minus_monotonic()

    def advance(t):
        # emulator time is purely logical, so TTI t's serving can be
        # computed during the idle tail of TTI t-1: at the boundary only
        # the publish and the controller turnaround remain on the
        # critical path, short enough to survive the several-fold
        # slowdowns this host shows during contention windows
        nonlocal pending
        rep = emu.serve_tti(pending)
        pending = None
        metrics.record_tti(t, emu, emu.last_weights_used)
        return encode_report(rep)

    try:
        if kill_ric_after == 0:
            ric_proc.terminate()
            ric_proc.join()
        payload_out = advance(0)
        deadline = time.monotonic()
        for t in range(duration):
            # pace relative to the previous TTI rather than an absolute
            # epoch: if the host froze the process for several ms, racing
            # wall clock would burn every catch-up TTI with no listening
            # window at all.  A slip of more than one TTI rebases the clock.
            now = time.monotonic()
            deadline = (now if now - deadline > TTI_S else deadline) + TTI_S
            pub_time = time.monotonic()
            report_pub.publish(payload_out)

            # poll out the TTI waiting for the answering policy (the
            # higher-priority controller preempts this spin the moment the
            # report lands, computes, replies, and yields back); arrivals
            # are dated by the kernel receive stamp, so a reply that
            # reached the host in time still counts (and is applied at the
            # same boundary) even if this process read it late
            matched = False
            while not matched and time.monotonic() < deadline:
                payload = policy_sub.poll()
                if payload is None:
                    continue
                msg = decode_policy(payload)
                pending = msg
                if msg.ric_time == t:
                    result.rtts_s.append(policy_sub.last_ts_s - ts_offset
                                         - pub_time)
                    result.decisions_in_tti += 1
                    matched = True

            if not matched:
                # the loop exits on the clock without a final read; a reply
                # already queued with an in-deadline kernel stamp did land
                payload = policy_sub.poll()
                if payload is not None:
                    msg = decode_policy(payload)
                    pending = msg
                    arrival = policy_sub.last_ts_s - ts_offset
                    if msg.ric_time == t and arrival <= deadline:
                        result.rtts_s.append(arrival - pub_time)
                        result.decisions_in_tti += 1
                        matched = True

            if time.monotonic() > deadline:
                result.deadline_overruns += 1
            if kill_ric_after is not None and t + 1 == kill_ric_after:
                ric_proc.terminate()
                ric_proc.join()
            if t + 1 < duration:
                payload_out = advance(t + 1)
            _pace_to(deadline)
    finally:
        restore()
        report_pub.close()
        policy_sub.close()
    return result


def protocol_rtt_benchmark(n_ues=100, n_ttis=2000, base_port=None):
    """Round-trip benchmark of the report/policy path alone.

    Publishes an n_ues-wide report each 1 ms TTI; an echo controller in a
    separate process answers with an equal-weight policy.  Returns the
    list of measured round trips in seconds.
    """
    base_port = base_port if base_port is not None else socket_base_port() + 10
    report_port, policy_port = base_port, base_port + 1
    ctx = mp.get_context("spawn")
    stats_q = ctx.Queue()
    proc = ctx.Process(target=_ric_process,
                       args=(report_port, policy_port, None, stats_q, 0.0),
                       daemon=True)
    proc.start()
    stats_q.get(timeout=30.0)

    restore = _enter_realtime(priority=RAN_PRIORITY)
    report_pub = UdpPublisher(("127.0.0.1", report_port))
    policy_sub = UdpSubscriber(("127.0.0.1", policy_port), timestamps=True)
    ues = tuple(UeReport(rnti=i + 1, cqi=(i % 15) + 1,
                         backlog_bytes=1_000_000 + i, tx_bytes_last_tti=4500)
                for i in range(n_ues))
    rtts = []
    ts_offset = _realtime_minus_monotonic()
    undo_tuning = _tune_fair_server()
    try:
        payload_out = encode_report(ReportMsg(0, ues))
        deadline = time.monotonic()
        for t in range(n_ttis):
            now = time.monotonic()
            deadline = (now if now - deadline > TTI_S else deadline) + TTI_S
            pub_time = time.monotonic()
            report_pub.publish(payload_out)
            matched = False
            while not matched and time.monotonic() < deadline:
                payload = policy_sub.poll()
                if payload is None:
                    continue
                if decode_policy(payload).ric_time == t:
                    rtts.append(policy_sub.last_ts_s - ts_offset - pub_time)
                    matched = True
            # encode the next report off the critical path
            payload_out = encode_report(ReportMsg(t + 1, ues))
            _pace_to(deadline)
    finally:
        undo_tuning()
        restore()
        report_pub.close()
        policy_sub.close()
    try:
        stats_q.get(timeout=5.0)
    except Exception:
        pass
    proc.join(timeout=2.0)
    if proc.is_alive():
        proc.terminate()
    return rtts
