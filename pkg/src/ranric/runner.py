"""Scenario orchestration: the lockstep loop, pacing, and run comparison.

``run_scenario`` drives the emulator and the controller in lockstep within
one process.  Reports and policies flow through symmetric TTI delay lines,
so a zero delay models an edge-colocated controller (state is one TTI old
when the weights are applied) and a delay of d TTIs models a cloud
controller (state is 2d TTIs old).  Logical mode runs as fast as
possible; realtime mode paces each TTI at 1 ms wall-clock with identical
numerical results.

The two-process realtime mode (controller in a separate OS process over
UDP channels) lives in :mod:`ranric.realtime`.
"""

from __future__ import annotations

import time
from pathlib import Path

from .delay import TtiDelayLine
from .metrics import MetricsLog, read_summary_csv
from . import mlp
from .policies import (
    CqiFairPolicy,
    FixedEqualPolicy,
    MaxWeightPolicy,
    NeuralPolicy,
    PropFairPolicy,
    policy_to_msg,
)
from .ran import CellConfig, RanEmulator, UeContext
from .rt_e2 import SyncState, sync_step
from .scenario import ConfigError, ScenarioConfig
from .traffic import CbrSource, VideoServerSource
from .video import AppStateUplink, VideoSession, video_step


def build_emulator(config: ScenarioConfig) -> RanEmulator:
    ues = []
    for spec in config.ues:
        source = spec.cqi.build(trace_dir=config.base_dir)
        video = None
        traffic = None
        if spec.traffic.kind == "cbr":
            traffic = CbrSource(spec.traffic.rate_bps)
        elif spec.traffic.kind == "video":
            video = VideoSession(spec.rnti, spec.traffic.bitrate_bps,
                                 start_buffer_s=spec.traffic.start_buffer_s)
            traffic = VideoServerSource(video)
        ues.append(UeContext(spec.rnti, source, traffic,
                             queue_capacity=spec.queue_capacity, video=video))
    cell = CellConfig(n_rbs_per_tti=config.n_rbs_per_tti)
    return RanEmulator(cell, ues)


def build_policy(config: ScenarioConfig):
    ric = config.ric
    if ric.policy == "cqi_fair":
        return CqiFairPolicy()
    if ric.policy == "prop_fair":
        return PropFairPolicy(ric.ewma_alpha)
    if ric.policy == "max_weight":
        return MaxWeightPolicy()
    if ric.policy == "fixed_equal":
        return FixedEqualPolicy()
    if ric.policy == "neural":
        path = Path(ric.policy_file)
        if not path.is_absolute():
            path = config.base_dir / path
        net = mlp.load(path)
        if net.n_ues != len(config.ues):
            raise ConfigError(
                f"policy network is for {net.n_ues} UEs, scenario has {len(config.ues)}"
            )
        return NeuralPolicy(net)
    raise ConfigError(f"unknown policy {ric.policy!r}")


def run_scenario(config: ScenarioConfig, out_dir=None, policy=None) -> MetricsLog:
    """Run a scenario to completion; optionally persist metrics to out_dir."""
    emu = build_emulator(config)
    policy = policy or build_policy(config)
    delay = config.ric.delay_ttis
    report_line = TtiDelayLine(delay)
    policy_line = TtiDelayLine(delay)
    uplink = AppStateUplink(config.uplink_delay_ms)
    sync = SyncState()
    metrics = MetricsLog([u.rnti for u in emu.ues], config.duration_ttis)

    paced = config.mode == "realtime"
    t0 = time.monotonic() if paced else 0.0

    for t in range(config.duration_ttis):
        # RAN half of the TTI: apply the newest visible policy, serve, report
        pmsg = policy_line.poll(t)
        report = emu.serve_tti(pmsg)
        for ue in emu.ues:
            if ue.video is not None:
                msg = video_step(ue.video, ue.last_tti_tx, t)
                if msg is not None:
                    uplink.publish(msg, t)
                    metrics.media_buffer.setdefault(ue.rnti, []).append(
                        (t, msg.media_buffer_s)
                    )
        metrics.record_tti(t, emu, emu.last_weights_used)
        report_line.publish(report, t)

        # controller half: act on the newest report visible this TTI
        rep = report_line.poll(t)
        if rep is not None:
            sync_step(sync, rep.ran_time)
            buffers = uplink.visible_buffers(t)
            weights = policy.compute(rep, buffers)
            policy_line.publish(policy_to_msg(rep, weights), t)
            sync.ric_time = rep.ran_time + 1

        if paced:
            deadline = t0 + (t + 1) * 1e-3
            now = time.monotonic()
            if now < deadline:
                time.sleep(deadline - now)

    for ue in emu.ues:
        if ue.video is not None:
            metrics.stall_total_s[ue.rnti] = ue.video.stall_total_s
    metrics.lazy_ric_events = sync.lazy_ric_events
    metrics.lazy_ran_events = sync.lazy_ran_events

    if out_dir is not None:
        metrics.dump(Path(out_dir))
    return metrics


def compare(run_dirs, out_path=None) -> str:
    """Tabulate summaries of >= 2 completed runs; returns CSV text."""
    if len(run_dirs) < 2:
        raise ValueError("compare needs at least two runs")
    summaries = []
    for d in run_dirs:
        path = Path(d) / "summary.csv"
        if not path.exists():
            raise FileNotFoundError(f"no summary.csv under {d}")
        summaries.append((Path(d).name, read_summary_csv(path)))
    metrics = ["avg_throughput_mbps", "mean_total_backlog_mb", "total_stall_s"]
    lines = ["run," + ",".join(metrics)]
    for name, s in summaries:
        lines.append(name + "," + ",".join(f"{s.get(m, 0.0):.6f}" for m in metrics))
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text)
    return text


def format_comparison(csv_text: str) -> str:
    rows = [line.split(",") for line in csv_text.strip().splitlines()]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows
    )
