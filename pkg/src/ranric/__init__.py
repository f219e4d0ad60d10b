"""TTI-scale RAN emulator with a decoupled realtime controller.

A 1 ms-clocked downlink RAN emulator (per-UE queues, trace-driven or
synthetic channel quality, weight-proportional resource block
allocation) exchanges per-TTI state reports and weight policies with a
controller over conflating pub/sub channels.  Classical and learned
scheduling policies run either edge-colocated (sub-millisecond loop) or
behind an injected delay emulating a cloud controller, and a DASH-style
video client model supports cross-layer scheduling studies.
"""

__version__ = "0.1.0"

from . import rt_e2
from .ran import CellConfig, RanEmulator, UeContext, allocate_rbs, make_bytes_per_rb
from .runner import build_emulator, build_policy, compare, run_scenario
from .scenario import ScenarioConfig, load_scenario

__all__ = [
    "CellConfig",
    "RanEmulator",
    "ScenarioConfig",
    "UeContext",
    "allocate_rbs",
    "build_emulator",
    "build_policy",
    "compare",
    "load_scenario",
    "make_bytes_per_rb",
    "rt_e2",
    "run_scenario",
]
