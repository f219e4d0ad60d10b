"""Portable serialized MLP: the policy network file format and forward pass.

The same binary file is written by the trainer and read by the realtime
executor, so the layout is fixed and fully validated on load:

* little-endian throughout, float32 parameters stored exactly as trained;
* a header freezing the state layout (throughput or video task), the UE
  count, and the normalization constants the state vector was built with,
  so trainer and executor cannot diverge;
* a list of dense layers (row-major weight matrix, bias, activation tag).

See docs/policy_file.md for the byte-level layout.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"MLPW"
FORMAT_VERSION = 1

LAYOUT_THROUGHPUT = "ThroughputTask"   # state = [B_i..] + [CQI_i..], dim 2N
LAYOUT_VIDEO = "VideoTask"             # state = [B_i..] + [CQI_i..] + [MB_i..], dim 3N
_LAYOUT_TAGS = {LAYOUT_THROUGHPUT: 0, LAYOUT_VIDEO: 1}
_LAYOUT_NAMES = {v: k for k, v in _LAYOUT_TAGS.items()}

ACTIVATIONS = ("tanh", "relu", "linear")

_HEADER = struct.Struct("<4sHBHfff B")   # magic, version, layout, n_ues, norms, n_layers
_LAYER_HDR = struct.Struct("<IIB")       # rows, cols, activation


class PolicyFileError(ValueError):
    """The policy network file is malformed."""


@dataclass(frozen=True)
class NormConstants:
    """Scales dividing the raw state entries before the forward pass."""
    cqi_scale: float = 15.0
    backlog_scale: float = 3_000_000.0   # default per-UE queue capacity, bytes
    media_scale: float = 6.0             # media buffer cap, seconds


@dataclass(frozen=True)
class Layer:
    weights: np.ndarray   # (rows, cols) float32
    bias: np.ndarray      # (rows,) float32
    activation: str

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise PolicyFileError(f"unknown activation {self.activation!r}")
        if self.weights.shape != (self.bias.shape[0], self.weights.shape[1]):
            raise PolicyFileError("weight/bias shape mismatch")


@dataclass(frozen=True)
class PolicyNetwork:
    state_layout: str
    n_ues: int
    layers: tuple = field(default_factory=tuple)
    norm: NormConstants = NormConstants()

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.state_layout not in _LAYOUT_TAGS:
            raise PolicyFileError(f"unknown state layout {self.state_layout!r}")
        if not self.layers:
            raise PolicyFileError("network has no layers")
        expect = self.input_dim
        for i, layer in enumerate(self.layers):
            if layer.weights.shape[1] != expect:
                raise PolicyFileError(
                    f"layer {i} input dim {layer.weights.shape[1]} != expected {expect}"
                )
            expect = layer.weights.shape[0]
        if expect != self.n_ues:
            raise PolicyFileError(f"output dim {expect} != n_ues {self.n_ues}")
        for i, layer in enumerate(self.layers):
            if not (np.isfinite(layer.weights).all() and np.isfinite(layer.bias).all()):
                raise PolicyFileError(f"layer {i} contains non-finite values")

    @property
    def input_dim(self) -> int:
        per_ue = 2 if self.state_layout == LAYOUT_THROUGHPUT else 3
        return per_ue * self.n_ues

    def forward(self, state: np.ndarray) -> np.ndarray:
        """Dense forward pass; returns the raw output logits (float32)."""
        x = np.asarray(state, dtype=np.float32)
        if x.shape != (self.input_dim,):
            raise ValueError(f"state shape {x.shape} != ({self.input_dim},)")
        for layer in self.layers:
            x = layer.weights @ x + layer.bias
            if layer.activation == "tanh":
                x = np.tanh(x)
            elif layer.activation == "relu":
                x = np.maximum(x, 0.0)
        return x


def save(net: PolicyNetwork, path):
    layout = _LAYOUT_TAGS[net.state_layout]
    n = net.norm
    blob = [_HEADER.pack(MAGIC, FORMAT_VERSION, layout, net.n_ues,
                         n.cqi_scale, n.backlog_scale, n.media_scale,
                         len(net.layers))]
    for layer in net.layers:
        rows, cols = layer.weights.shape
        blob.append(_LAYER_HDR.pack(rows, cols, ACTIVATIONS.index(layer.activation)))
        blob.append(np.ascontiguousarray(layer.weights, dtype=np.float32).tobytes())
        blob.append(np.ascontiguousarray(layer.bias, dtype=np.float32).tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(blob))


def load(path) -> PolicyNetwork:
    with open(path, "rb") as f:
        buf = f.read()
    if len(buf) < _HEADER.size:
        raise PolicyFileError(f"{path}: truncated at byte {len(buf)}")
    magic, version, layout, n_ues, cqi_s, backlog_s, media_s, n_layers = \
        _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise PolicyFileError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise PolicyFileError(f"{path}: unknown version {version}")
    if layout not in _LAYOUT_NAMES:
        raise PolicyFileError(f"{path}: unknown state layout tag {layout}")
    layers = []
    off = _HEADER.size
    for i in range(n_layers):
        if off + _LAYER_HDR.size > len(buf):
            raise PolicyFileError(f"{path}: truncated at byte {off}")
        rows, cols, act = _LAYER_HDR.unpack_from(buf, off)
        off += _LAYER_HDR.size
        if act >= len(ACTIVATIONS):
            raise PolicyFileError(f"{path}: layer {i} unknown activation tag {act}")
        nbytes = 4 * rows * (cols + 1)
        if off + nbytes > len(buf):
            raise PolicyFileError(f"{path}: truncated at byte {off}")
        w = np.frombuffer(buf, dtype="<f4", count=rows * cols, offset=off)
        off += 4 * rows * cols
        b = np.frombuffer(buf, dtype="<f4", count=rows, offset=off)
        off += 4 * rows
        layers.append(Layer(w.reshape(rows, cols).copy(), b.copy(), ACTIVATIONS[act]))
    if off != len(buf):
        raise PolicyFileError(f"{path}: {len(buf) - off} trailing bytes at offset {off}")
    return PolicyNetwork(
        state_layout=_LAYOUT_NAMES[layout],
        n_ues=n_ues,
        layers=tuple(layers),
        norm=NormConstants(cqi_s, backlog_s, media_s),
    )
