"""Per-run metrics store and its on-disk formats.

All per-TTI series are preallocated numpy arrays owned by the scenario
loop; summaries (average throughput, mean total backlog, stall totals)
are always recomputable from the raw series.  Persistence is a per-TTI
CSV, a summary CSV, and a compact self-describing binary series file --
all byte-deterministic so seeded runs reproduce identical files.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

_SERIES_MAGIC = b"RRSB"


class MetricsLog:
    def __init__(self, rntis, n_ttis: int):
        self.rntis = list(rntis)
        self.n_ttis = n_ttis
        n = len(self.rntis)
        self.served = np.zeros((n_ttis, n), dtype=np.int64)
        self.backlog = np.zeros((n_ttis, n), dtype=np.int64)
        self.cqi = np.zeros((n_ttis, n), dtype=np.int16)
        self.weights = np.zeros((n_ttis, n), dtype=np.float64)
        self.rb_counts = np.zeros((n_ttis, n), dtype=np.int16)
        self.dropped = np.zeros((n_ttis, n), dtype=np.int64)
        self.media_buffer = {}    # rnti -> list of (tti, seconds)
        self.events = []          # (tti, kind, detail)
        self.stall_total_s = {}   # rnti -> seconds, filled at end of run
        self.lazy_ric_events = 0
        self.lazy_ran_events = 0

    def record_tti(self, t: int, emu, weights: dict):
        for j, ue in enumerate(emu.ues):
            self.served[t, j] = ue.last_tti_tx
            self.backlog[t, j] = ue.queue_bytes
            self.cqi[t, j] = ue.last_cqi
            self.weights[t, j] = weights.get(ue.rnti, 0.0)
            self.rb_counts[t, j] = ue.last_rb_count
            self.dropped[t, j] = ue.last_dropped
            if ue.last_dropped:
                self.events.append((t, "drop", f"rnti={ue.rnti} bytes={ue.last_dropped}"))

    # ----- summaries (recomputable from the series) -----

    def avg_throughput_mbps(self) -> float:
        total_bytes = int(self.served.sum())
        seconds = self.n_ttis / 1000.0
        return total_bytes * 8 / seconds / 1e6

    def per_ue_throughput_mbps(self) -> dict:
        seconds = self.n_ttis / 1000.0
        return {
            rnti: int(self.served[:, j].sum()) * 8 / seconds / 1e6
            for j, rnti in enumerate(self.rntis)
        }

    def mean_total_backlog_mb(self) -> float:
        return float(self.backlog.sum(axis=1).mean()) / 1e6

    def max_total_backlog_bytes(self) -> int:
        return int(self.backlog.sum(axis=1).max())

    def total_stall_s(self) -> float:
        return float(sum(self.stall_total_s.values()))

    def summary(self) -> dict:
        out = {
            "avg_throughput_mbps": self.avg_throughput_mbps(),
            "mean_total_backlog_mb": self.mean_total_backlog_mb(),
            "max_total_backlog_bytes": self.max_total_backlog_bytes(),
            "total_stall_s": self.total_stall_s(),
            "dropped_bytes": int(self.dropped.sum()),
            "lazy_ric_events": self.lazy_ric_events,
            "lazy_ran_events": self.lazy_ran_events,
        }
        for rnti, mbps in self.per_ue_throughput_mbps().items():
            out[f"thrpt_mbps_rnti{rnti}"] = mbps
        for rnti, s in sorted(self.stall_total_s.items()):
            out[f"stall_s_rnti{rnti}"] = s
        return out

    # ----- persistence -----

    def dump(self, out_dir):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self._dump_summary_csv(out_dir / "summary.csv")
        self._dump_series_csv(out_dir / "series.csv")
        self._dump_series_bin(out_dir / "series.bin")
        self._dump_events_csv(out_dir / "events.csv")
        if self.media_buffer:
            self._dump_media_csv(out_dir / "media_buffer.csv")

    def _dump_media_csv(self, path):
        with open(path, "w") as f:
            f.write("tti,rnti,media_buffer_s\n")
            for rnti in sorted(self.media_buffer):
                for t, s in self.media_buffer[rnti]:
                    f.write(f"{t},{rnti},{s:.9g}\n")

    def _dump_summary_csv(self, path):
        items = self.summary()
        with open(path, "w") as f:
            f.write("metric,value\n")
            for k, v in items.items():
                f.write(f"{k},{v:.6f}\n" if isinstance(v, float) else f"{k},{v}\n")

    def _dump_series_csv(self, path):
        cols = ["tti"]
        for rnti in self.rntis:
            cols += [f"served_{rnti}", f"backlog_{rnti}", f"cqi_{rnti}",
                     f"weight_{rnti}", f"rb_{rnti}"]
        with open(path, "w") as f:
            f.write(",".join(cols) + "\n")
            for t in range(self.n_ttis):
                row = [str(t)]
                for j in range(len(self.rntis)):
                    row += [
                        str(self.served[t, j]), str(self.backlog[t, j]),
                        str(self.cqi[t, j]), f"{self.weights[t, j]:.9g}",
                        str(self.rb_counts[t, j]),
                    ]
                f.write(",".join(row) + "\n")

    def _dump_events_csv(self, path):
        with open(path, "w") as f:
            f.write("tti,kind,detail\n")
            for t, kind, detail in self.events:
                f.write(f"{t},{kind},{detail}\n")

    def _dump_series_bin(self, path):
        """name/dtype/shape-tagged raw arrays; fixed layout, no timestamps."""
        arrays = {
            "served": self.served, "backlog": self.backlog, "cqi": self.cqi,
            "weights": self.weights, "rb_counts": self.rb_counts,
            "dropped": self.dropped,
        }
        with open(path, "wb") as f:
            f.write(_SERIES_MAGIC)
            f.write(struct.pack("<H", len(arrays)))
            for name, arr in arrays.items():
                nb = name.encode()
                dt = arr.dtype.str.encode()
                f.write(struct.pack("<H", len(nb)) + nb)
                f.write(struct.pack("<H", len(dt)) + dt)
                f.write(struct.pack("<B", arr.ndim))
                f.write(struct.pack(f"<{arr.ndim}q", *arr.shape))
                f.write(np.ascontiguousarray(arr).tobytes())


def load_series_bin(path) -> dict:
    with open(path, "rb") as f:
        buf = f.read()
    if buf[:4] != _SERIES_MAGIC:
        raise ValueError(f"{path}: not a series file")
    (count,) = struct.unpack_from("<H", buf, 4)
    off = 6
    out = {}
    for _ in range(count):
        (nlen,) = struct.unpack_from("<H", buf, off); off += 2
        name = buf[off:off + nlen].decode(); off += nlen
        (dlen,) = struct.unpack_from("<H", buf, off); off += 2
        dtype = np.dtype(buf[off:off + dlen].decode()); off += dlen
        (ndim,) = struct.unpack_from("<B", buf, off); off += 1
        shape = struct.unpack_from(f"<{ndim}q", buf, off); off += 8 * ndim
        n = int(np.prod(shape)) * dtype.itemsize
        out[name] = np.frombuffer(buf, dtype=dtype, count=int(np.prod(shape)),
                                  offset=off).reshape(shape)
        off += n
    return out


def read_summary_csv(path) -> dict:
    out = {}
    with open(path) as f:
        next(f)
        for line in f:
            k, v = line.rstrip("\n").split(",", 1)
            out[k] = float(v)
    return out
