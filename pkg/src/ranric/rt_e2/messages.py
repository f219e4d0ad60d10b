"""Per-TTI state and control messages and their binary wire encoding.

Two message types cross the RAN/RIC boundary every TTI:

* ``ReportMsg`` -- RAN -> RIC snapshot: the RAN's TTI counter plus one
  ``UeReport`` per attached UE (rnti, cqi, downlink backlog, bytes sent in
  the previous TTI).
* ``PolicyMsg`` -- RIC -> RAN control: the TTI counter of the report this
  decision answers, plus a per-rnti scheduling weight map.

The wire format is a fixed-layout little-endian encoding with a 2-byte
version header; see docs/wire_format.md for the byte layout.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

WIRE_VERSION = 1

_REPORT_HDR = struct.Struct("<HQH")        # version, ran_time, n_ues
_UE_ENTRY = struct.Struct("<IBQI")         # rnti, cqi, backlog, tx_last_tti
_POLICY_HDR = struct.Struct("<HQH")        # version, ric_time, n_entries
_WEIGHT_ENTRY = struct.Struct("<Id")       # rnti, weight

CQI_MIN = 1
CQI_MAX = 15


class WireError(ValueError):
    """Raised when a byte sequence cannot be decoded as a message."""


@dataclass(frozen=True)
class UeReport:
    rnti: int
    cqi: int
    backlog_bytes: int
    tx_bytes_last_tti: int = 0

    def __post_init__(self):
        if not (CQI_MIN <= self.cqi <= CQI_MAX):
            raise ValueError(f"cqi {self.cqi} outside [{CQI_MIN}, {CQI_MAX}]")
        if self.backlog_bytes < 0:
            raise ValueError("backlog_bytes must be >= 0")
        if self.tx_bytes_last_tti < 0:
            raise ValueError("tx_bytes_last_tti must be >= 0")


@dataclass(frozen=True)
class ReportMsg:
    ran_time: int
    ues: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ues", tuple(self.ues))
        if self.ran_time < 0:
            raise ValueError("ran_time must be >= 0")
        rntis = [u.rnti for u in self.ues]
        if len(rntis) != len(set(rntis)):
            raise ValueError("duplicate rnti in report")


@dataclass(frozen=True)
class PolicyMsg:
    ric_time: int
    weights: dict

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        if self.ric_time < 0:
            raise ValueError("ric_time must be >= 0")
        for rnti, w in self.weights.items():
            if w < 0:
                raise ValueError(f"negative weight for rnti {rnti}")
        if self.weights and all(w == 0 for w in self.weights.values()):
            raise ValueError("at least one weight must be > 0")


def encode_report(msg: ReportMsg) -> bytes:
    parts = [_REPORT_HDR.pack(WIRE_VERSION, msg.ran_time, len(msg.ues))]
    pack = _UE_ENTRY.pack
    parts.extend(
        pack(u.rnti, u.cqi, u.backlog_bytes, u.tx_bytes_last_tti) for u in msg.ues
    )
    return b"".join(parts)


def decode_report(buf: bytes) -> ReportMsg:
    if len(buf) < _REPORT_HDR.size:
        raise WireError(f"report truncated at byte {len(buf)}")
    version, ran_time, n_ues = _REPORT_HDR.unpack_from(buf)
    if version != WIRE_VERSION:
        raise WireError(f"unknown wire version {version}")
    want = _REPORT_HDR.size + n_ues * _UE_ENTRY.size
    if len(buf) != want:
        raise WireError(f"report length {len(buf)} != expected {want}")
    ues = []
    off = _REPORT_HDR.size
    for _ in range(n_ues):
        rnti, cqi, backlog, tx = _UE_ENTRY.unpack_from(buf, off)
        ues.append(UeReport(rnti, cqi, backlog, tx))
        off += _UE_ENTRY.size
    return ReportMsg(ran_time, tuple(ues))


def encode_policy(msg: PolicyMsg) -> bytes:
    parts = [_POLICY_HDR.pack(WIRE_VERSION, msg.ric_time, len(msg.weights))]
    pack = _WEIGHT_ENTRY.pack
    # sorted so the encoding is deterministic regardless of dict insert order
    parts.extend(pack(r, w) for r, w in sorted(msg.weights.items()))
    return b"".join(parts)


def decode_policy(buf: bytes) -> PolicyMsg:
    if len(buf) < _POLICY_HDR.size:
        raise WireError(f"policy truncated at byte {len(buf)}")
    version, ric_time, n = _POLICY_HDR.unpack_from(buf)
    if version != WIRE_VERSION:
        raise WireError(f"unknown wire version {version}")
    want = _POLICY_HDR.size + n * _WEIGHT_ENTRY.size
    if len(buf) != want:
        raise WireError(f"policy length {len(buf)} != expected {want}")
    weights = {}
    off = _POLICY_HDR.size
    for _ in range(n):
        rnti, w = _WEIGHT_ENTRY.unpack_from(buf, off)
        weights[rnti] = w
        off += _WEIGHT_ENTRY.size
    return PolicyMsg(ric_time, weights)
