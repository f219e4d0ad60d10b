"""Reset/step environment service for policy training.

Exposes the logical-mode emulator over a line-delimited JSON protocol on
a local TCP socket, so a trainer in any language can drive it:

    -> {"cmd": "spec"}
    <- {"n_ues": 2, "task": "throughput", "state_dim": 4, "rntis": [1, 2],
        "norm": {"cqi_scale": 15.0, ...}}
    -> {"cmd": "reset"}
    <- {"state": [...], "ran_time": 0}
    -> {"cmd": "step", "weights": [0.9, 0.1]}      # rnti-ascending order
    <- {"state": [...], "reward": 0.27, "ran_time": 1}
    -> {"cmd": "close"}

One step advances exactly one TTI.  The state vector is already
normalized with the constants reported by "spec" (the same constants the
executor freezes into the policy file).  Rewards: throughput task = total
megabits served that TTI; video task = sum over streaming UEs of -20 if
the media buffer is under 2 s else +2.

Protocol errors (step before reset, bad weights) get an {"error": ...}
reply and the session survives.
"""

from __future__ import annotations

import json
import os
import socket

from .mlp import LAYOUT_THROUGHPUT, LAYOUT_VIDEO, NormConstants
from .policies import NEUTRAL_MEDIA_BUFFER
from .ran import RanEmulator
from .rt_e2 import PolicyMsg
from .runner import build_emulator
from .scenario import ScenarioConfig
from .video import AppStateUplink, video_step

DEFAULT_ENV_PORT = 47655


def env_port() -> int:
    return int(os.environ.get("RANRIC_ENV_PORT", str(DEFAULT_ENV_PORT)))


class EnvSession:
    """One training environment over a scenario config (logical mode)."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.task = LAYOUT_VIDEO if any(
            u.traffic.kind == "video" for u in config.ues) else LAYOUT_THROUGHPUT
        self.norm = NormConstants()
        self.rntis = sorted(u.rnti for u in config.ues)
        self.emu: RanEmulator | None = None
        self.uplink: AppStateUplink | None = None
        self.steps = 0

    @property
    def state_dim(self) -> int:
        per_ue = 2 if self.task == LAYOUT_THROUGHPUT else 3
        return per_ue * len(self.rntis)

    def spec(self) -> dict:
        return {
            "n_ues": len(self.rntis),
            "task": "throughput" if self.task == LAYOUT_THROUGHPUT else "video",
            "state_dim": self.state_dim,
            "rntis": self.rntis,
            "norm": {
                "cqi_scale": self.norm.cqi_scale,
                "backlog_scale": self.norm.backlog_scale,
                "media_scale": self.norm.media_scale,
            },
        }

    def reset(self) -> dict:
        self.emu = build_emulator(self.config)
        self.uplink = AppStateUplink(self.config.uplink_delay_ms)
        self.steps = 0
        return {"state": self._state(), "ran_time": 0}

    def _state(self) -> list:
        emu = self.emu
        t = emu.ran_time
        state = [ue.queue_bytes / self.norm.backlog_scale for ue in emu.ues]
        # peek the channel at the current TTI (sources allow repeat queries)
        state += [ue.cqi_source.next_cqi(t) / self.norm.cqi_scale for ue in emu.ues]
        if self.task == LAYOUT_VIDEO:
            visible = self.uplink.visible_buffers(t)
            for ue in emu.ues:
                if ue.rnti in visible:
                    state.append(visible[ue.rnti] / self.norm.media_scale)
                else:
                    state.append(NEUTRAL_MEDIA_BUFFER)
        return state

    def step(self, weights) -> dict:
        if self.emu is None:
            raise ProtocolError("step before reset")
        if len(weights) != len(self.rntis):
            raise ProtocolError(f"expected {len(self.rntis)} weights")
        if any(w < 0 for w in weights):
            raise ProtocolError("weights must be >= 0")
        wmap = dict(zip(self.rntis, (float(w) for w in weights)))
        if all(w == 0 for w in wmap.values()):
            wmap = {r: 1.0 for r in wmap}
        t = self.emu.ran_time
        self.emu.serve_tti(PolicyMsg(ric_time=t, weights=wmap))
        reward = 0.0
        for ue in self.emu.ues:
            if ue.video is not None:
                msg = video_step(ue.video, ue.last_tti_tx, t)
                if msg is not None:
                    self.uplink.publish(msg, t)
                reward += -20.0 if ue.video.media_buffer_s < 2.0 else 2.0
        if self.task == LAYOUT_THROUGHPUT:
            reward = sum(ue.last_tti_tx for ue in self.emu.ues) * 8 / 1e6
        self.steps += 1
        return {"state": self._state(), "reward": reward,
                "ran_time": self.emu.ran_time}


class ProtocolError(Exception):
    pass


def handle_line(session: EnvSession, line: str) -> dict | None:
    """Returns the reply dict, or None for a close request."""
    try:
        req = json.loads(line)
    except json.JSONDecodeError:
        return {"error": "invalid json"}
    cmd = req.get("cmd")
    try:
        if cmd == "spec":
            return session.spec()
        if cmd == "reset":
            return session.reset()
        if cmd == "step":
            weights = req.get("weights")
            if not isinstance(weights, list):
                raise ProtocolError("step requires a weights list")
            return session.step(weights)
        if cmd == "close":
            return None
        return {"error": f"unknown cmd {cmd!r}"}
    except ProtocolError as e:
        return {"error": str(e)}


def serve(config: ScenarioConfig, host="127.0.0.1", port=None, max_clients=None):
    """Serve the environment; one client at a time, sequential requests."""
    port = port if port is not None else env_port()
    srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    srv.bind((host, port))
    srv.listen(1)
    served = 0
    try:
        while max_clients is None or served < max_clients:
            conn, _ = srv.accept()
            served += 1
            session = EnvSession(config)
            with conn, conn.makefile("rwb") as f:
                for raw in f:
                    reply = handle_line(session, raw.decode())
                    if reply is None:
                        break
                    f.write((json.dumps(reply) + "\n").encode())
                    f.flush()
    finally:
        srv.close()
