"""The classical schedulers side by side on one contended cell.

Two UEs on antiphase sweep channels, 35 Mbps offered against a cell that
peaks at 38.8 Mbps: enough load that the weight policy decides who wins.
CQI-fair chases instantaneous channel quality, proportional fair evens
out long-run shares, max-weight also watches the queues, and the fixed
equal split ignores everything.
"""

import dataclasses
from pathlib import Path

from ranric.runner import run_scenario
from ranric.scenario import RicSpec, load_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

POLICIES = ["fixed_equal", "cqi_fair", "prop_fair", "max_weight"]


def main():
    base = load_scenario(CONFIGS / "2ue_synthetic_maxcqi_edge.yaml")
    print(f"{'policy':<12} {'total':>10} {'ue1':>8} {'ue2':>8} "
          f"{'backlog':>10} {'dropped':>10}")
    for policy in POLICIES:
        cfg = dataclasses.replace(base, ric=RicSpec(policy=policy))
        m = run_scenario(cfg)
        per = m.per_ue_throughput_mbps()
        print(f"{policy:<12} {m.avg_throughput_mbps():>6.1f} Mbps"
              f" {per[1]:>8.1f} {per[2]:>8.1f}"
              f" {m.mean_total_backlog_mb():>7.2f} MB"
              f" {int(m.dropped.sum()):>10,}")


if __name__ == "__main__":
    main()
