"""Compare the compiled and numpy ladder kernels.

    python benchmarks/bench_kernels.py [--freqs 2001] [--elements 8] [--repeat 50]

Both kernels are imported directly so the env flag is not needed here.
"""
import argparse
import time

import numpy as np

from pumpnet import kernels


def random_ladder(rng, n):
    kinds = rng.integers(0, 9, n).astype(np.int64)
    v1 = np.empty(n)
    v2 = np.zeros(n)
    for i, k in enumerate(kinds):
        if k in (kernels.SERIES_L, kernels.SHUNT_L):
            v1[i] = rng.uniform(0.1e-9, 5e-9)
        elif k in (kernels.SERIES_C, kernels.SHUNT_C):
            v1[i] = rng.uniform(0.05e-12, 2e-12)
        elif k in (kernels.SERIES_R, kernels.SHUNT_R):
            v1[i] = rng.uniform(1.0, 500.0)
        else:
            v1[i] = rng.uniform(10.0, 120.0)
            v2[i] = rng.uniform(5e-12, 80e-12)
    return kinds, v1, v2


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--freqs", type=int, default=2001)
    ap.add_argument("--elements", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    kinds, v1, v2 = random_ladder(rng, args.elements)
    s = 1j * 2 * np.pi * np.linspace(1e9, 20e9, args.freqs) - 1e7

    ref = kernels.ladder_abcd_numpy(kinds, v1, v2, s)
    got = kernels.ladder_abcd_loop(kinds, v1, v2, s)  # also triggers compilation
    err = np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300))

    t_np = best_of(lambda: kernels.ladder_abcd_numpy(kinds, v1, v2, s), args.repeat)
    t_nb = best_of(lambda: kernels.ladder_abcd_loop(kinds, v1, v2, s), args.repeat)
    # the mode finder calls the kernel with a handful of points at a time
    s_small = s[:4]
    t_np_small = best_of(lambda: kernels.ladder_abcd_numpy(kinds, v1, v2, s_small), args.repeat * 20)
    t_nb_small = best_of(lambda: kernels.ladder_abcd_loop(kinds, v1, v2, s_small), args.repeat * 20)

    print(f"elements={args.elements} freqs={args.freqs} max rel diff={err:.2e}")
    print(f"{'case':<14}{'numpy [us]':>12}{'numba [us]':>12}{'speedup':>10}")
    for name, a, b in (("sweep", t_np, t_nb), ("4 points", t_np_small, t_nb_small)):
        print(f"{name:<14}{a * 1e6:>12.1f}{b * 1e6:>12.1f}{a / b:>10.1f}")


if __name__ == "__main__":
    main()
