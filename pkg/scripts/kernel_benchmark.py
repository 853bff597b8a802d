#!/usr/bin/env python3
"""Wall-time comparison of the O(N^2) convolution kernel against the
padded-transform kernel, plus a cross-agreement column."""

import argparse
import time

import numpy as np

from burgers_lab.dynamics import nonlinear_direct, nonlinear_pseudospectral


def median_time(fn, psi, repeats):
    fn(psi)  # warm-up
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(psi)
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024, 4096, 16384])
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'N':>7} {'direct [ms]':>12} {'transform [ms]':>15} {'speedup':>8} {'rel diff':>10}")
    for N in args.sizes:
        psi = rng.uniform(-1.0, 1.0, N)
        t_direct = median_time(nonlinear_direct, psi, args.repeats)
        t_fft = median_time(nonlinear_pseudospectral, psi, args.repeats)
        d = nonlinear_direct(psi)
        p = nonlinear_pseudospectral(psi)
        rel = np.max(np.abs(d - p)) / np.max(np.abs(d))
        print(f"{N:7d} {t_direct * 1e3:12.3f} {t_fft * 1e3:15.3f} "
              f"{t_direct / t_fft:8.1f} {rel:10.2e}")


if __name__ == "__main__":
    main()
