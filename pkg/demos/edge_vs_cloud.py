"""Why controller placement matters: the same scheduler at 0/15/30 ms.

Runs the 2-UE antiphase-sweep scenario under CQI-fair weights with the
controller colocated (edge), 15 ms away and 30 ms away.  The channels
swap roles every few seconds; a delayed controller keeps boosting the UE
whose channel peak has already passed, so throughput collapses as the
control loop ages.
"""

from pathlib import Path

from ranric.runner import run_scenario
from ranric.scenario import load_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SCENARIOS = [
    ("edge (0 ms)", "2ue_synthetic_maxcqi_edge.yaml"),
    ("15 ms away", "2ue_synthetic_maxcqi_15ms.yaml"),
    ("30 ms away", "2ue_synthetic_maxcqi_30ms.yaml"),
]


def main():
    print(f"{'placement':<12} {'throughput':>12} {'mean backlog':>13}")
    baseline = None
    for label, fname in SCENARIOS:
        m = run_scenario(load_scenario(CONFIGS / fname))
        mbps = m.avg_throughput_mbps()
        baseline = baseline or mbps
        print(f"{label:<12} {mbps:>9.1f} Mbps {m.mean_total_backlog_mb():>10.2f} MB"
              f"   ({mbps / baseline:.2f}x of edge)")


if __name__ == "__main__":
    main()
