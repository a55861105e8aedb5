"""Benchmark the compiled ray-march kernel against the pure-NumPy fallback.

Usage: python benchmarks/bench_raycast.py [--size 640x480] [--repeats 5]
"""

import argparse
import time

import numpy as np

from radardepth.geometry import default_intrinsics
from radardepth.scene import make_scene, sample_pose
from radardepth.scene.raycast import BACKEND, raycast_heightfield, raycast_heightfield_py
from radardepth.scene.render import pixel_ray_dirs


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", default="640x480")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    width, height = (int(v) for v in args.size.lower().split("x"))

    scene = make_scene([args.seed, 1])
    intrinsics = default_intrinsics(width, height)
    pose = sample_pose(scene, [args.seed, 9], intrinsics)
    dirs = pixel_ray_dirs(pose, intrinsics)
    t_max = 1.05 * float((pose.position[2] - scene.min_height) / (-dirs[:, 2]).min()) + 1.0
    kwargs = dict(t_max=t_max, slope_bound=scene.slope_bound(), hit_tol=1e-9, dt_min=1e-2)

    backends = [("python", raycast_heightfield_py)]
    if BACKEND == "compiled":
        backends.insert(0, ("compiled", raycast_heightfield))
    else:
        print("compiled extension not available; benchmarking fallback only")

    results = {}
    outputs = {}
    for name, fn in backends:
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            outputs[name] = fn(scene.heightfield, scene.cell_size, pose.position, dirs, **kwargs)
            best = min(best, time.perf_counter() - t0)
        results[name] = best
        print(f"{name:>9}: {1000 * best:8.1f} ms   {len(dirs) / best / 1e6:6.2f} Mray/s")

    if len(results) == 2:
        print(f"  speedup: {results['python'] / results['compiled']:.2f}x")
        match = np.array_equal(outputs["compiled"], outputs["python"])
        print(f"  outputs bitwise equal: {match}")


if __name__ == "__main__":
    main()
