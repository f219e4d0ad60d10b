"""Per-UE channel quality sources.

Synthetic generators draw a fresh CQI at every hold boundary (uniform over
a full/good/poor range, or a clamped +-1 random walk), deterministically
under a fixed seed.  Trace sources replay a CSV of ``tti_offset,cqi``
samples cyclically, for trace-driven mobility scenarios.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

CQI_MIN = 1
CQI_MAX = 15

#: CQI range per generator kind
KIND_RANGES = {
    "UniformFull": (1, 15),
    "UniformGood": (8, 15),
    "UniformPoor": (1, 7),
}


class TraceFormatError(ValueError):
    """A trace file could not be parsed."""


@dataclass(frozen=True)
class CqiGeneratorSpec:
    kind: str                   # UniformFull | UniformGood | UniformPoor | RandomWalk | TraceFile
    seed: int = 0
    hold_ttis: int = 2          # TTIs between CQI changes
    path: str | None = None     # trace file, TraceFile only
    start: int = 8              # RandomWalk initial value

    def build(self, trace_dir=None) -> "CqiSource":
        if self.kind in KIND_RANGES:
            lo, hi = KIND_RANGES[self.kind]
            return UniformCqiSource(lo, hi, self.seed, self.hold_ttis)
        if self.kind == "RandomWalk":
            return RandomWalkCqiSource(self.start, self.seed, self.hold_ttis)
        if self.kind == "TraceFile":
            if self.path is None:
                raise ValueError("TraceFile spec requires a path")
            path = Path(self.path)
            if trace_dir is not None and not path.is_absolute():
                path = Path(trace_dir) / path
            return TraceCqiSource(load_trace(path))
        raise ValueError(f"unknown CQI generator kind {self.kind!r}")


class UniformCqiSource:
    """Uniform redraw in [lo, hi] at each hold boundary.

    next_cqi must be queried with non-decreasing TTIs (the emulator loop is
    monotone); within a hold period the value is constant.
    """

    def __init__(self, lo: int, hi: int, seed: int, hold_ttis: int):
        if hold_ttis < 1:
            raise ValueError("hold_ttis must be >= 1")
        self._lo, self._hi = lo, hi
        self._hold = hold_ttis
        self._rng = random.Random(seed)
        self._period = -1
        self._value = lo

    def next_cqi(self, tti: int) -> int:
        period = tti // self._hold
        while self._period < period:
            self._value = self._rng.randint(self._lo, self._hi)
            self._period += 1
        return self._value


class RandomWalkCqiSource:
    """Step in {-1, 0, +1} at each hold boundary, clamped to [1, 15]."""

    def __init__(self, start: int, seed: int, hold_ttis: int):
        if not (CQI_MIN <= start <= CQI_MAX):
            raise ValueError("start outside CQI range")
        if hold_ttis < 1:
            raise ValueError("hold_ttis must be >= 1")
        self._hold = hold_ttis
        self._rng = random.Random(seed)
        self._period = 0
        self._value = start

    def next_cqi(self, tti: int) -> int:
        period = tti // self._hold
        while self._period < period:
            step = self._rng.choice((-1, 0, 1))
            self._value = min(CQI_MAX, max(CQI_MIN, self._value + step))
            self._period += 1
        return self._value


@dataclass(frozen=True)
class CqiTrace:
    samples: tuple            # ((tti_offset, cqi), ...)
    period: int               # sample spacing in TTIs

    @property
    def cycle_ttis(self) -> int:
        return self.samples[-1][0] + self.period


class TraceCqiSource:
    """Cyclic replay of a CqiTrace, O(1) lookup via a precomputed table."""

    def __init__(self, trace: CqiTrace):
        self.trace = trace
        cycle = trace.cycle_ttis
        table = [0] * cycle
        idx = 0
        for t in range(cycle):
            if idx + 1 < len(trace.samples) and trace.samples[idx + 1][0] <= t:
                idx += 1
            table[t] = trace.samples[idx][1]
        self._table = table
        self._cycle = cycle

    def next_cqi(self, tti: int) -> int:
        return self._table[tti % self._cycle]


def load_trace(path) -> CqiTrace:
    """Parse a ``tti_offset,cqi`` CSV (header line optional)."""
    samples = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if lineno == 1 and not fields[0].lstrip("-").isdigit():
                continue  # header
            if len(fields) != 2:
                raise TraceFormatError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
            try:
                offset, cqi = int(fields[0]), int(fields[1])
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-integer field") from None
            if not (CQI_MIN <= cqi <= CQI_MAX):
                raise TraceFormatError(f"{path}:{lineno}: cqi {cqi} outside [1, 15]")
            if samples and offset <= samples[-1][0]:
                raise TraceFormatError(f"{path}:{lineno}: tti_offset not strictly increasing")
            samples.append((offset, cqi))
    if not samples:
        raise TraceFormatError(f"{path}: empty trace")
    period = samples[1][0] - samples[0][0] if len(samples) > 1 else 1
    return CqiTrace(tuple(samples), period)
