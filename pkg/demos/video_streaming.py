"""Cross-layer scheduling for video: does app state help the MAC?

Two 6 Mbps streamers share the cell with two 10 Mbps bulk loaders for
120 s.  Max-weight only sees queues and channels, so a loader's deep
backlog outbids a streamer whose media buffer is about to run dry.  A
cross-layer neural policy additionally sees each client's media-buffer
level (reported over a 20 ms uplink) and can pre-empt the stall.

The neural run needs a trained policy at models/video_policy.bin (built
by the companion trainer); without it the demo shows the baseline only.
"""

from pathlib import Path

from ranric.runner import run_scenario
from ranric.scenario import load_scenario

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"


def report(label, m):
    stalls = {r: m.stall_total_s[r] for r in sorted(m.stall_total_s)}
    total = sum(stalls.values())
    per = "  ".join(f"ue{r}: {s:.1f} s" for r, s in stalls.items())
    print(f"{label:<22} total stall {total:5.1f} s   ({per})"
          f"   cell {m.avg_throughput_mbps():.1f} Mbps")


def main():
    m = run_scenario(load_scenario(CONFIGS / "video_crosslayer_maxweight.yaml"))
    report("max_weight", m)

    neural_cfg = CONFIGS / "video_crosslayer_neural.yaml"
    model = ROOT / "models" / "video_policy.bin"
    if model.exists():
        report("neural (cross-layer)", run_scenario(load_scenario(neural_cfg)))
    else:
        print(f"neural (cross-layer)   skipped: no policy at {model}")


if __name__ == "__main__":
    main()
