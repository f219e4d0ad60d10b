#!/usr/bin/env python3
"""Generate the shared golden policy-network files and test vectors.

The binaries under tests/golden/ are read by both the Python executor
tests and the trainer's serialization tests, pinning the file format and
the forward-pass semantics across components.
"""

import json
from pathlib import Path

import numpy as np

from ranric import mlp

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden"


def build(seed, n_ues, layout, hidden):
    rng = np.random.default_rng(seed)
    d = (2 if layout == mlp.LAYOUT_THROUGHPUT else 3) * n_ues
    layers = (
        mlp.Layer(rng.standard_normal((hidden, d)).astype(np.float32),
                  rng.standard_normal(hidden).astype(np.float32), "tanh"),
        mlp.Layer(rng.standard_normal((hidden, hidden)).astype(np.float32),
                  rng.standard_normal(hidden).astype(np.float32), "tanh"),
        mlp.Layer(rng.standard_normal((n_ues, hidden)).astype(np.float32),
                  rng.standard_normal(n_ues).astype(np.float32), "linear"),
    )
    return mlp.PolicyNetwork(layout, n_ues, layers)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = []
    specs = [
        ("golden_2ue_throughput.bin", 101, 2, mlp.LAYOUT_THROUGHPUT, 8),
        ("golden_4ue_video.bin", 202, 4, mlp.LAYOUT_VIDEO, 16),
        ("golden_8ue_throughput.bin", 303, 8, mlp.LAYOUT_THROUGHPUT, 64),
    ]
    for name, seed, n_ues, layout, hidden in specs:
        net = build(seed, n_ues, layout, hidden)
        mlp.save(net, OUT / name)
        rng = np.random.default_rng(seed + 1)
        vectors = []
        for _ in range(5):
            state = rng.random(net.input_dim).astype(np.float32)
            out = net.forward(state)
            vectors.append({
                "state": [float(x) for x in state],
                "output": [float(x) for x in out],
            })
        manifest.append({"file": name, "n_ues": n_ues, "layout": layout,
                         "vectors": vectors})
    (OUT / "mlp_vectors.json").write_text(json.dumps(manifest, indent=1) + "\n")
    print(f"wrote {len(specs)} networks + vectors to {OUT}")


if __name__ == "__main__":
    main()
