"""TTI-level synchronization between the RAN and RIC clocks.

Both sides keep a TTI counter that advances when their per-TTI work
completes.  On every report the RIC compares the RAN's counter against its
own and resolves one of three cases:

* counters equal            -> proceed with this TTI's decision;
* RAN behind (startup)      -> pause until the RAN catches up;
* RIC behind (slow compute) -> fast-forward the RIC clock to the RAN's,
  abandoning the skipped TTIs.

``lazy_ric_events`` counts the TTIs lost to fast-forwarding (a 3x-slow
RIC loses ~2/3 of TTIs); ``lazy_ran_events`` counts pause resolutions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class SyncAction(enum.Enum):
    PROCEED = "proceed"
    PAUSE_RIC = "pause_ric"
    FAST_FORWARD_RIC = "fast_forward_ric"


@dataclass
class SyncState:
    ran_time: int = 0
    ric_time: int = 0
    lazy_ran_events: int = 0
    lazy_ric_events: int = 0


def sync_step(state: SyncState, observed_ran_time: int) -> SyncAction:
    """Resolve the RIC clock against the RAN time seen in the latest report."""
    state.ran_time = observed_ran_time
    if observed_ran_time < state.ric_time:
        state.lazy_ran_events += 1
        return SyncAction.PAUSE_RIC
    if observed_ran_time > state.ric_time:
        state.lazy_ric_events += observed_ran_time - state.ric_time
        state.ric_time = observed_ran_time
        return SyncAction.FAST_FORWARD_RIC
    return SyncAction.PROCEED
