"""Declarative scenario configuration (YAML) and validation.

A scenario names the UEs (channel spec + traffic), the cell, the
controller placement (policy kind and one-way delay), the run length and
the clock mode.  See configs/ for bundled scenarios and docs/config.md
for the schema.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .cqi import CqiGeneratorSpec
from .ran import DEFAULT_QUEUE_CAPACITY

POLICY_KINDS = ("cqi_fair", "prop_fair", "max_weight", "neural", "fixed_equal")
MODES = ("logical", "realtime")


class ConfigError(ValueError):
    """The scenario configuration is invalid."""


@dataclass(frozen=True)
class TrafficSpec:
    kind: str                    # cbr | video | none
    rate_bps: int = 0            # cbr
    bitrate_bps: int = 0         # video
    start_buffer_s: float = 0.0  # video


@dataclass(frozen=True)
class UeSpec:
    rnti: int
    cqi: CqiGeneratorSpec
    traffic: TrafficSpec
    queue_capacity: int = DEFAULT_QUEUE_CAPACITY


@dataclass(frozen=True)
class RicSpec:
    policy: str = "max_weight"
    ewma_alpha: float = 0.01
    delay_ttis: int = 0
    policy_file: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    duration_ttis: int
    ues: tuple
    ric: RicSpec = RicSpec()
    n_rbs_per_tti: int = 50
    seed: int = 0
    mode: str = "logical"
    uplink_delay_ms: int = 20
    base_dir: Path = field(default_factory=Path)   # resolves relative paths

    def __post_init__(self):
        if self.duration_ttis <= 0:
            raise ConfigError("duration_ttis must be > 0")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.ric.policy not in POLICY_KINDS:
            raise ConfigError(f"policy must be one of {POLICY_KINDS}")
        if self.ric.policy == "neural" and not self.ric.policy_file:
            raise ConfigError("neural policy requires policy_file")
        if not (0 < self.ric.ewma_alpha <= 1):
            raise ConfigError("ewma_alpha must be in (0, 1]")
        if self.ric.delay_ttis < 0:
            raise ConfigError("delay_ttis must be >= 0")
        if not self.ues:
            raise ConfigError("at least one UE required")
        rntis = [u.rnti for u in self.ues]
        if len(rntis) != len(set(rntis)):
            raise ConfigError("duplicate rnti")


def _parse_traffic(node) -> TrafficSpec:
    if node is None:
        return TrafficSpec(kind="none")
    kind = node.get("kind")
    if kind == "cbr":
        if "rate_mbps" in node:
            rate = int(round(float(node["rate_mbps"]) * 1e6))
        else:
            rate = int(node.get("rate_bps", 0))
        return TrafficSpec(kind="cbr", rate_bps=rate)
    if kind == "video":
        if "bitrate_mbps" in node:
            bps = int(round(float(node["bitrate_mbps"]) * 1e6))
        else:
            bps = int(node.get("bitrate_bps", 6_000_000))
        return TrafficSpec(kind="video", bitrate_bps=bps,
                           start_buffer_s=float(node.get("start_buffer_s", 0.0)))
    if kind in ("none", None):
        return TrafficSpec(kind="none")
    raise ConfigError(f"unknown traffic kind {kind!r}")


def _parse_ue(node, scenario_seed: int) -> UeSpec:
    try:
        rnti = int(node["rnti"])
    except KeyError:
        raise ConfigError("ue entry missing rnti") from None
    cqi_node = node.get("cqi")
    if not cqi_node or "kind" not in cqi_node:
        raise ConfigError(f"ue {rnti}: cqi spec with a kind is required")
    cqi = CqiGeneratorSpec(
        kind=cqi_node["kind"],
        seed=int(cqi_node.get("seed", scenario_seed * 1000 + rnti)),
        hold_ttis=int(cqi_node.get("hold_ttis", 2)),
        path=cqi_node.get("path"),
        start=int(cqi_node.get("start", 8)),
    )
    return UeSpec(
        rnti=rnti,
        cqi=cqi,
        traffic=_parse_traffic(node.get("traffic")),
        queue_capacity=int(node.get("queue_capacity", DEFAULT_QUEUE_CAPACITY)),
    )


def parse_scenario(doc: dict, base_dir=".") -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping")
    for key in ("name", "duration_ttis", "ues"):
        if key not in doc:
            raise ConfigError(f"missing required field {key!r}")
    seed = int(doc.get("seed", 0))
    ric_node = doc.get("ric", {}) or {}
    ric = RicSpec(
        policy=ric_node.get("policy", "max_weight"),
        ewma_alpha=float(ric_node.get("ewma_alpha", 0.01)),
        delay_ttis=int(ric_node.get("delay_ttis", 0)),
        policy_file=ric_node.get("policy_file"),
    )
    cell_node = doc.get("cell", {}) or {}
    ues = tuple(_parse_ue(n, seed) for n in doc["ues"])
    return ScenarioConfig(
        name=str(doc["name"]),
        duration_ttis=int(doc["duration_ttis"]),
        ues=ues,
        ric=ric,
        n_rbs_per_tti=int(cell_node.get("n_rbs_per_tti", 50)),
        seed=seed,
        mode=doc.get("mode", "logical"),
        uplink_delay_ms=int(doc.get("uplink_delay_ms", 20)),
        base_dir=Path(base_dir),
    )


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from None
    return parse_scenario(doc, base_dir=path.parent)


def socket_base_port() -> int:
    """Base UDP port for the two-process realtime channels."""
    return int(os.environ.get("RANRIC_PORT", "47600"))


def output_dir(default="runs") -> Path:
    return Path(os.environ.get("RANRIC_OUT_DIR", default))
