#!/usr/bin/env python3
"""Generate the bundled synthetic CQI traces under traces/.

All traces use the `tti_offset,cqi` CSV format with a 2-TTI sample
period and replay cyclically.  The mobility-flavored traces approximate
qualitative shapes only:

* sweep_*    -- deterministic antiphase triangle sweeps spanning CQI 1..15
                (the "synthetic channel" scenarios; 120 TTI period puts the
                channel coherence between edge and cloud control latency)
* turntable_* -- strong, roughly periodic dips from fast rotation
* drone_*     -- fast large swings, changes in the sub-10 ms range
* car_*       -- slow smooth curves
* robot_*     -- good channel with occasional deep blockage drops
* flat15      -- constant best CQI (calibration / stability scenarios)

Deterministic: fixed seeds, byte-stable output.
"""

import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "traces"
PERIOD = 2  # sample spacing in TTIs


def clamp(x):
    return max(1, min(15, int(round(x))))


def write(name, values):
    path = OUT / f"{name}.csv"
    with open(path, "w") as f:
        f.write("tti_offset,cqi\n")
        for k, v in enumerate(values):
            f.write(f"{k * PERIOD},{v}\n")
    print(f"{path}  ({len(values)} samples, {len(values) * PERIOD} TTIs/cycle)")


def triangle(t, period, phase):
    ph = ((t + phase) % period) / period
    x = 2 * ph if ph < 0.5 else 2 * (1 - ph)
    return clamp(1 + x * 14)


def sweep(phase, cycle=120):
    return [triangle(k * PERIOD, cycle, phase) for k in range(cycle // PERIOD)]


def turntable(seed, n=30000):
    rng = random.Random(seed)
    out = []
    rot_period = rng.randint(1400, 1800)  # one rotation, TTIs
    for k in range(n):
        t = k * PERIOD
        base = 11 + 2 * math.sin(2 * math.pi * t / 9000)
        dip = 8 * max(0.0, math.sin(2 * math.pi * t / rot_period)) ** 6
        out.append(clamp(base - dip + rng.uniform(-1, 1)))
    return out


def drone(seed, n=30000):
    rng = random.Random(seed)
    out = []
    v = 9.0
    for _ in range(n):
        v += rng.uniform(-3.5, 3.5)  # big swing every 2 TTIs
        v = max(1.0, min(15.0, v))
        out.append(clamp(v))
    return out


def car(seed, n=30000):
    rng = random.Random(seed)
    f1 = rng.uniform(2500, 3500)
    f2 = rng.uniform(9000, 12000)
    out = []
    for k in range(n):
        t = k * PERIOD
        v = 9 + 4 * math.sin(2 * math.pi * t / f1) + 2 * math.sin(2 * math.pi * t / f2)
        out.append(clamp(v + rng.uniform(-0.5, 0.5)))
    return out


def robot(seed, n=30000):
    rng = random.Random(seed)
    out = []
    blocked_until = -1
    for k in range(n):
        t = k * PERIOD
        if t > blocked_until and rng.random() < 0.0008:
            blocked_until = t + rng.randint(150, 400)  # lid blockage
        if t <= blocked_until:
            out.append(clamp(2 + rng.uniform(0, 1.5)))
        else:
            out.append(clamp(12 + rng.uniform(-1.5, 1.5)))
    return out


def main():
    OUT.mkdir(exist_ok=True)
    write("sweep_a", sweep(0))
    write("sweep_b", sweep(60))
    for i, phase in enumerate((0, 30, 60, 90)):
        write(f"sweep4_{'abcd'[i]}", sweep(phase))
    for i in (1, 2):
        write(f"turntable_{i}", turntable(100 + i))
        write(f"drone_{i}", drone(200 + i))
        write(f"car_{i}", car(300 + i))
        write(f"robot_{i}", robot(400 + i))
    write("flat15", [15, 15])


if __name__ == "__main__":
    main()
