"""Measure the realtime control loop on this machine.

Part 1 runs the 4-UE scenario with the controller in its own OS process,
each TTI paced at 1 ms wall clock, and reports how often the policy
answering TTI t made it back before TTI t ended.  Part 2 hammers the
bare report/policy path with 100-UE reports to isolate the protocol cost
from the emulator.

Both parts want a quiet CPU; on a busy or virtualized host the in-TTI
fraction drops with every multi-millisecond pause the OS inflicts
(the medians barely move -- the loop itself costs tens of microseconds).

    python demos/realtime_latency.py [seconds]
"""

import dataclasses
import statistics
import sys
from pathlib import Path

from ranric.realtime import protocol_rtt_benchmark, run_realtime
from ranric.scenario import load_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def percentile(xs, p):
    xs = sorted(xs)
    return xs[min(len(xs) - 1, int(len(xs) * p / 100))]


def main():
    seconds = int(sys.argv[1]) if len(sys.argv) > 1 else 10

    cfg = load_scenario(CONFIGS / "4ue_realtime.yaml")
    cfg = dataclasses.replace(cfg, duration_ttis=seconds * 1000)
    print(f"paced 4-UE run, {seconds} s ...")
    res = run_realtime(cfg)
    us = [r * 1e6 for r in res.rtts_s]
    print(f"  decisions in their TTI: {res.decisions_in_tti}/{res.n_ttis}"
          f" ({res.in_tti_fraction:.2%})")
    print(f"  round trip: median {statistics.median(us):.0f} us,"
          f" p99 {percentile(us, 99):.0f} us")
    print(f"  deadline overruns: {res.deadline_overruns}")

    print("bare protocol, 100-UE reports, 2000 TTIs ...")
    rtts = [r * 1e6 for r in protocol_rtt_benchmark(n_ues=100, n_ttis=2000)]
    print(f"  round trip: median {statistics.median(rtts):.0f} us,"
          f" p99 {percentile(rtts, 99):.0f} us ({len(rtts)}/2000 answered in-TTI)")


if __name__ == "__main__":
    main()
