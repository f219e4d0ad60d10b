"""TTI-clocked downlink RAN emulator.

Each TTI the emulator enqueues traffic arrivals (drop-tail), samples every
UE's CQI, picks the latest received weight policy (or the configured
fallback), splits the resource blocks in proportion to the weights with
the largest-remainder method, dequeues what the per-CQI transport capacity
allows, and emits a state report.  The loop never waits on the controller:
a missing or stale policy simply leaves the previous weights in force.

The CQI -> bytes-per-RB table is the standard LTE spectral-efficiency
table scaled by 150 resource elements per RB and one global calibration
constant, pinned so a full-CQI cell at 50 RBs carries ~38.8 Mbps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .rt_e2 import PolicyMsg, ReportMsg, UeReport

log = logging.getLogger(__name__)

#: spectral efficiency (bits/symbol) per CQI index 1..15
CQI_EFFICIENCY = (
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770,
    1.1758, 1.4766, 1.9141, 2.4063, 2.7305,
    3.3223, 3.9023, 4.5234, 5.1152, 5.5547,
)

RES_PER_RB = 150
#: single global constant calibrating CQI-15 x 50 RBs to ~38.8 Mbps
CAPACITY_CALIBRATION = 0.936

DEFAULT_QUEUE_CAPACITY = 3_000_000   # bytes per UE


def make_bytes_per_rb(calibration: float = CAPACITY_CALIBRATION) -> dict:
    """cqi -> bytes one RB carries in one TTI."""
    table = {}
    for cqi, eff in enumerate(CQI_EFFICIENCY, start=1):
        table[cqi] = max(1, round(eff * RES_PER_RB * calibration / 8))
    return table


@dataclass
class CellConfig:
    n_rbs_per_tti: int = 50
    bytes_per_rb: dict = field(default_factory=make_bytes_per_rb)
    tti_us: int = 1000
    default_weights: dict | None = None   # fallback when no policy yet; None = equal

    def __post_init__(self):
        vals = [self.bytes_per_rb[c] for c in sorted(self.bytes_per_rb)]
        if any(b >= a for a, b in zip(vals[1:], vals)):
            raise ValueError("bytes_per_rb must be strictly increasing in cqi")
        if self.n_rbs_per_tti <= 0:
            raise ValueError("n_rbs_per_tti must be > 0")

    @property
    def peak_rate_mbps(self) -> float:
        return self.bytes_per_rb[15] * self.n_rbs_per_tti * 8 / 1000.0


class UeContext:
    """Emulator-side per-UE state: downlink queue, channel and traffic."""

    def __init__(self, rnti, cqi_source, traffic=None,
                 queue_capacity=DEFAULT_QUEUE_CAPACITY, video=None):
        self.rnti = rnti
        self.cqi_source = cqi_source
        self.traffic = traffic
        self.video = video                  # VideoSession when streaming
        self.queue_capacity = queue_capacity
        self.queue_bytes = 0
        self.cum_tx_bytes = 0
        self.dropped_bytes = 0
        self.last_cqi = 1
        self.last_tti_tx = 0
        self.last_rb_count = 0
        self.last_arrivals = 0
        self.last_dropped = 0


def allocate_rbs(weights: dict, n_rbs: int, active) -> dict:
    """Split n_rbs across the active rntis in proportion to their weights.

    Weights are normalized over the active set; the integer split uses the
    largest-remainder method with ties broken by ascending rnti, so each
    count is within 1 RB of its exact proportional share.  Unknown rntis
    in the weight map are ignored; an all-zero (or empty) weight map falls
    back to an equal split.
    """
    if n_rbs <= 0:
        raise ValueError("n_rbs must be > 0")
    active = sorted(active)
    counts = {rnti: 0 for rnti in active}
    if not active:
        return counts

    known = {r: w for r, w in weights.items() if r in counts}
    unknown = set(weights) - set(known)
    if unknown:
        log.debug("ignoring weights for unknown/inactive rntis %s", sorted(unknown))
    total = sum(known.values())
    if total <= 0:
        known = {rnti: 1.0 for rnti in active}
        total = float(len(active))

    floors = {}
    remainders = []
    assigned = 0
    for rnti in active:
        share = known.get(rnti, 0.0) / total * n_rbs
        floors[rnti] = int(share)
        assigned += floors[rnti]
        remainders.append((-(share - floors[rnti]), rnti))
    remainders.sort()
    for _, rnti in remainders[: n_rbs - assigned]:
        floors[rnti] += 1
    return floors


class RanEmulator:
    """Owns the cell, the UE contexts and the TTI counter."""

    def __init__(self, cell: CellConfig, ues):
        rntis = [u.rnti for u in ues]
        if len(rntis) != len(set(rntis)):
            raise ValueError("duplicate rnti")
        self.cell = cell
        self.ues = sorted(ues, key=lambda u: u.rnti)
        self.ran_time = 0
        self._latest_weights = None
        self.last_weights_used = {}
        self.fallback_ttis = 0   # TTIs scheduled without any received policy

    def serve_tti(self, policy: PolicyMsg | None) -> ReportMsg:
        """Run one TTI; returns the state report for this TTI."""
        t = self.ran_time
        cell = self.cell

        for ue in self.ues:
            arr = ue.traffic.arrivals(t) if ue.traffic is not None else 0
            room = ue.queue_capacity - ue.queue_bytes
            enq = min(arr, room)
            ue.queue_bytes += enq
            ue.last_arrivals = arr
            ue.last_dropped = arr - enq
            ue.dropped_bytes += arr - enq
            ue.last_cqi = ue.cqi_source.next_cqi(t)

        if policy is not None:
            self._latest_weights = policy.weights
        weights = self._latest_weights
        if weights is None:
            weights = cell.default_weights or {u.rnti: 1.0 for u in self.ues}
            self.fallback_ttis += 1
        self.last_weights_used = weights

        active = [u.rnti for u in self.ues if u.queue_bytes > 0]
        rb = allocate_rbs(weights, cell.n_rbs_per_tti, active)

        ues_out = []
        for ue in self.ues:
            n = rb.get(ue.rnti, 0)
            served = min(ue.queue_bytes, n * cell.bytes_per_rb[ue.last_cqi])
            ue.queue_bytes -= served
            ue.cum_tx_bytes += served
            ue.last_tti_tx = served
            ue.last_rb_count = n
            ues_out.append(UeReport(ue.rnti, ue.last_cqi, ue.queue_bytes, served))

        self.ran_time = t + 1
        return ReportMsg(t, tuple(ues_out))
