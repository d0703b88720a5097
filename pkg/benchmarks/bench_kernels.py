"""Compare the compiled and numpy Dirichlet-polynomial kernels.

    python3 benchmarks/bench_kernels.py --terms 5000 --points 2000 --repeat 5
"""
import argparse
import time

import numpy as np

from rhexplore import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=5000)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    kernels.set_threads(args.threads)

    rng = np.random.default_rng(0)
    n = np.arange(1, args.terms + 1)
    c = rng.choice([-1.0, 1.0], size=args.terms).astype(complex)
    logb = np.log(n).astype(complex)
    s = rng.uniform(0, 1, args.points) + 1j * rng.uniform(10, 1000, args.points)

    cases = {
        "dirichlet_points": lambda b: kernels.dirichlet_points(c, logb, s, backend=b),
        "dirichlet_line": lambda b: kernels.dirichlet_line(c, logb, 0.5, 10.0, 0.01, args.points, backend=b),
    }
    print(f"terms={args.terms} points={args.points} threads={args.threads} default={kernels.BACKEND}")
    print(f"{'kernel':18s} {'numpy [s]':>10s} {'cython [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases.items():
        tn, vn = best_of(lambda: fn("numpy"), args.repeat)
        try:
            tc, vc = best_of(lambda: fn("cython"), args.repeat)
        except ImportError:
            print(f"{name:18s} {tn:10.4f} {'n/a':>11s}")
            continue
        diff = np.max(np.abs(vc - vn) / np.maximum(np.abs(vn), 1.0))
        print(f"{name:18s} {tn:10.4f} {tc:11.4f} {tn / tc:8.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()
