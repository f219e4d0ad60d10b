"""Scenario orchestration: lockstep loop, pacing, delay injection."""

import numpy as np
import pytest

from ranric import mlp
from ranric.policies import NeuralPolicy
from ranric.runner import build_policy, run_scenario
from ranric.scenario import ConfigError, parse_scenario


def _config(mode="logical", delay=0, duration=500, policy="cqi_fair"):
    return parse_scenario({
        "name": "r",
        "duration_ttis": duration,
        "seed": 9,
        "mode": mode,
        "ric": {"policy": policy, "delay_ttis": delay},
        "ues": [
            {"rnti": 1, "cqi": {"kind": "UniformFull", "seed": 91},
             "traffic": {"kind": "cbr", "rate_mbps": 17.5}},
            {"rnti": 2, "cqi": {"kind": "UniformFull", "seed": 92},
             "traffic": {"kind": "cbr", "rate_mbps": 17.5}},
        ],
    })


def test_realtime_pacing_matches_logical_numerics():
    # the 1 ms pacing must not change a single number
    a = run_scenario(_config(mode="logical"))
    b = run_scenario(_config(mode="realtime"))
    np.testing.assert_array_equal(a.served, b.served)
    np.testing.assert_array_equal(a.backlog, b.backlog)
    np.testing.assert_array_equal(a.weights, b.weights)


def test_realtime_mode_takes_wall_clock_time():
    import time
    t0 = time.monotonic()
    run_scenario(_config(mode="realtime", duration=300))
    assert time.monotonic() - t0 >= 0.28


def test_injected_delay_changes_behavior():
    edge = run_scenario(_config(delay=0, duration=4000))
    cloud = run_scenario(_config(delay=30, duration=4000))
    assert not np.array_equal(edge.weights, cloud.weights)


def test_delayed_policy_first_applied_after_round_trip():
    # one-way delay d: the first computed policy reaches the RAN at TTI 2d,
    # so the run starts on fallback weights
    m = run_scenario(_config(delay=10, duration=100))
    np.testing.assert_array_equal(m.weights[:20], 1.0)     # equal fallback
    assert not np.array_equal(m.weights[20:40], np.ones((20, 2)))


def test_policy_override_argument():
    class Constant:
        def compute(self, report, app_buffers=None):
            return {1: 3.0, 2: 1.0}

    m = run_scenario(_config(duration=200), policy=Constant())
    # after the first TTI the 3:1 weights are in force
    np.testing.assert_array_equal(m.weights[1:, 0], 3.0)
    np.testing.assert_array_equal(m.weights[1:, 1], 1.0)


def test_neural_policy_runs_end_to_end(repo_root):
    net = mlp.load(repo_root / "tests" / "golden" / "golden_2ue_throughput.bin")
    m = run_scenario(_config(duration=300), policy=NeuralPolicy(net))
    assert m.avg_throughput_mbps() > 0


def test_video_scenario_records_buffer_series_and_stalls():
    cfg = parse_scenario({
        "name": "rv",
        "duration_ttis": 4000,
        "seed": 2,
        "ues": [
            {"rnti": 1, "cqi": {"kind": "UniformGood", "seed": 21},
             "traffic": {"kind": "video", "bitrate_mbps": 6}},
        ],
    })
    m = run_scenario(cfg)
    assert 1 in m.media_buffer
    ttis = [t for t, _ in m.media_buffer[1]]
    assert ttis == list(range(0, 4000, 40))
    assert 1 in m.stall_total_s


def test_build_policy_neural_requires_matching_ue_count(repo_root, tmp_path):
    cfg = parse_scenario({
        "name": "mismatch",
        "duration_ttis": 10,
        "ric": {"policy": "neural",
                "policy_file": str(repo_root / "tests" / "golden"
                                   / "golden_4ue_video.bin")},
        "ues": [{"rnti": 1, "cqi": {"kind": "UniformFull"}}],
    })
    with pytest.raises(ConfigError, match="UEs"):
        build_policy(cfg)


def test_lockstep_run_has_no_lazy_events():
    m = run_scenario(_config(duration=1000))
    assert m.lazy_ric_events == 0
    assert m.lazy_ran_events == 0
