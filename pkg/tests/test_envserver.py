"""Reset/step training endpoint: session logic and the JSON-lines protocol."""

import json
import socket
import threading

import pytest

from ranric.envserver import EnvSession, handle_line, serve
from ranric.scenario import parse_scenario


def _throughput_config():
    return parse_scenario({
        "name": "env-t",
        "duration_ttis": 1000,
        "seed": 5,
        "ues": [
            {"rnti": 1, "cqi": {"kind": "UniformFull", "seed": 51},
             "traffic": {"kind": "cbr", "rate_mbps": 17.5}},
            {"rnti": 2, "cqi": {"kind": "UniformFull", "seed": 52},
             "traffic": {"kind": "cbr", "rate_mbps": 17.5}},
        ],
    })


def _video_config():
    return parse_scenario({
        "name": "env-v",
        "duration_ttis": 1000,
        "seed": 6,
        "ues": [
            {"rnti": 1, "cqi": {"kind": "UniformGood", "seed": 61},
             "traffic": {"kind": "video", "bitrate_mbps": 6}},
            {"rnti": 2, "cqi": {"kind": "UniformGood", "seed": 62},
             "traffic": {"kind": "cbr", "rate_mbps": 10}},
        ],
    })


def _idle_config():
    return parse_scenario({
        "name": "env-idle",
        "duration_ttis": 100,
        "ues": [{"rnti": 1, "cqi": {"kind": "UniformFull", "seed": 1}}],
    })


def test_spec_reports_layout():
    s = EnvSession(_throughput_config())
    spec = s.spec()
    assert spec["task"] == "throughput"
    assert spec["n_ues"] == 2
    assert spec["state_dim"] == 4
    assert spec["rntis"] == [1, 2]
    assert spec["norm"]["cqi_scale"] == 15.0

    v = EnvSession(_video_config())
    assert v.spec()["task"] == "video"
    assert v.spec()["state_dim"] == 6


def test_reset_then_step_advances_one_tti():
    s = EnvSession(_throughput_config())
    out = s.reset()
    assert out["ran_time"] == 0
    assert len(out["state"]) == 4
    step = s.step([0.5, 0.5])
    assert step["ran_time"] == 1
    assert step["reward"] >= 0.0


def test_state_normalized_to_unit_scale():
    s = EnvSession(_throughput_config())
    s.reset()
    for _ in range(200):
        out = s.step([1.0, 1.0])
    assert all(0.0 <= x <= 1.001 for x in out["state"])


def test_step_reward_is_served_megabits():
    s = EnvSession(_throughput_config())
    s.reset()
    total = 0.0
    for _ in range(100):
        total += s.step([1.0, 1.0])["reward"]
    served = sum(ue.cum_tx_bytes for ue in s.emu.ues)
    assert total == pytest.approx(served * 8 / 1e6)


def test_idle_cell_reward_zero():
    s = EnvSession(_idle_config())
    s.reset()
    assert s.step([1.0])["reward"] == 0.0


def test_video_reward_thresholds():
    # the per-UE reward rule: -20 below the 2 s threshold, +2 at or above
    s = EnvSession(_video_config())
    s.reset()
    r = s.step([1.0, 1.0])["reward"]
    assert r == -20.0   # single streamer, empty buffer at start
    # after plenty of service the buffer should sit above 2 s
    for _ in range(3000):
        r = s.step([1.0, 0.0])["reward"]
    assert r == 2.0


def test_reset_restores_identical_trajectory():
    s = EnvSession(_throughput_config())
    s.reset()
    first = [s.step([0.7, 0.3])["state"] for _ in range(50)]
    s.reset()
    second = [s.step([0.7, 0.3])["state"] for _ in range(50)]
    assert first == second


def test_protocol_errors_keep_session_alive():
    s = EnvSession(_throughput_config())
    assert "error" in handle_line(s, json.dumps({"cmd": "step", "weights": [1, 1]}))
    assert "error" in handle_line(s, "not json at all")
    assert "error" in handle_line(s, json.dumps({"cmd": "warp"}))
    assert "error" in handle_line(s, json.dumps({"cmd": "step"}))
    out = handle_line(s, json.dumps({"cmd": "reset"}))
    assert out["ran_time"] == 0
    assert "error" in handle_line(s, json.dumps({"cmd": "step", "weights": [1]}))
    assert "error" in handle_line(s, json.dumps({"cmd": "step", "weights": [-1, 1]}))
    out = handle_line(s, json.dumps({"cmd": "step", "weights": [1, 1]}))
    assert out["ran_time"] == 1


def test_all_zero_weights_fall_back_to_equal():
    s = EnvSession(_throughput_config())
    s.reset()
    out = s.step([0.0, 0.0])
    assert out["reward"] > 0.0   # traffic still served


def test_close_ends_connection():
    s = EnvSession(_throughput_config())
    assert handle_line(s, json.dumps({"cmd": "close"})) is None


def test_tcp_server_round_trip():
    config = _throughput_config()
    port = 47911
    th = threading.Thread(target=serve, args=(config,),
                          kwargs={"port": port, "max_clients": 1}, daemon=True)
    th.start()

    def request(f, obj):
        f.write((json.dumps(obj) + "\n").encode())
        f.flush()
        return json.loads(f.readline())

    for attempt in range(50):
        try:
            conn = socket.create_connection(("127.0.0.1", port), timeout=1.0)
            break
        except ConnectionRefusedError:
            threading.Event().wait(0.05)
    with conn, conn.makefile("rwb") as f:
        spec = request(f, {"cmd": "spec"})
        assert spec["task"] == "throughput"
        out = request(f, {"cmd": "reset"})
        assert out["ran_time"] == 0
        out = request(f, {"cmd": "step", "weights": [1.0, 1.0]})
        assert out["ran_time"] == 1
        f.write(b'{"cmd": "close"}\n')
        f.flush()
    th.join(timeout=5.0)
    assert not th.is_alive()
