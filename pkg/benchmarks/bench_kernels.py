"""Time the hot kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--n 200] [--queries 2000] [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from conequantile import ConeCdf, ConvexCone, EmpiricalSample, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200, help="sample size")
    ap.add_argument("--queries", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pts = rng.normal(size=(args.n, 2))
    Z = rng.normal(size=(args.queries, 2))
    s = EmpiricalSample(pts)
    exact = ConeCdf.build(s, ConvexCone.zero(2))
    grid = ConeCdf.build(s, ConvexCone.orthant(2), resolution=256, directions="grid", exact=False)
    box = np.array([[-5.0, -5.0], [5.0, -5.0], [5.0, 5.0], [-5.0, 5.0]])
    th = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    N = np.column_stack([np.cos(th), np.sin(th)])
    b = -np.ones(len(N))

    cases = {
        "sweep (Tukey depth)": lambda: exact.lower_cdf_many(Z),
        "grid minimum": lambda: grid.lower_cdf_many(Z),
        "halfspace membership": lambda: kernels.halfspace_member(N, b, Z, 1e-9),
        "polygon clip": lambda: kernels.clip_polygon(box, N, b, 1e-9),
    }
    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    kernels.warmup()
    print(f"n={args.n} queries={args.queries} best of {args.repeat}")
    print(f"{'kernel':24s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        row = []
        for be in backends:
            kernels.set_backend(be)
            row.append(best_of(fn, args.repeat))
        line = f"{name:24s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
