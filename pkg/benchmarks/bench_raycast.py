"""Compare the compiled raycast kernel against the pure-Python fallback.

Usage: python benchmarks/bench_raycast.py [--scans N] [--boxes N]

The kernel is the hot loop of the simulator: every LIDAR revolution casts
360 rays against every box face. The second section times whole-sim stepping
with whichever backend is active (set SCALEDSIM_PURE_PY=1 to force the
fallback there).
"""
import argparse
import math
import random
import time

from scaledsim import asset_path, raycast
from scaledsim import _raycast_py as raypy
from scaledsim.params import ParamSet
from scaledsim.simcore import Simulator
from scaledsim.world import ObstructionBox, box_segments, load_map

try:
    from scaledsim import _raycast_c as rayc
except ImportError:
    rayc = None


def build_scene(n_boxes, seed=1):
    rng = random.Random(seed)
    boxes = [ObstructionBox(rng.uniform(-4, 4), rng.uniform(-4, 4),
                            rng.uniform(0, math.tau),
                            rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5))
             for _ in range(n_boxes)]
    return box_segments(boxes)


def time_backend(label, fn, segs, scans):
    fn(0.0, 0.0, 0.1, 360, segs)   # warm up
    started = time.perf_counter()
    for k in range(scans):
        fn(0.0, 0.0, k * 0.01, 360, segs)
    elapsed = time.perf_counter() - started
    rate = scans / elapsed
    print(f"{label:>12}: {elapsed * 1e3 / scans:8.3f} ms/scan "
          f"({rate:10.1f} scans/s)")
    return elapsed


def bench_kernels(scans, boxes):
    segs = build_scene(boxes)
    print(f"LIDAR kernel, 360 rays x {boxes} boxes ({4 * boxes} segments), "
          f"{scans} scans per backend")
    py = time_backend("pure python", raypy.cast_rays, segs, scans)
    if rayc is not None:
        c = time_backend("compiled", rayc.cast_rays, segs, scans)
        print(f"{'speedup':>12}: {py / c:8.1f}x")
    else:
        print("compiled kernel not built; only the fallback was timed")


def bench_simulation(seconds=20.0):
    sim = Simulator(ParamSet(), load_map(asset_path("minimap.yaml")))
    ticks = int(seconds / sim.dt)
    sim.submit_teleop(1.0, 0.4)
    started = time.perf_counter()
    for _ in range(ticks):
        sim.step()
    elapsed = time.perf_counter() - started
    print(f"\nwhole sim ({raycast.BACKEND} backend): {ticks} ticks of "
          f"{seconds:.0f} s sim time in {elapsed:.2f} s "
          f"({ticks / elapsed:.0f} ticks/s)")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--scans", type=int, default=300)
    parser.add_argument("--boxes", type=int, default=8)
    args = parser.parse_args()
    bench_kernels(args.scans, args.boxes)
    bench_simulation()
