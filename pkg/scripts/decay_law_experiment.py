#!/usr/bin/env python3
"""Measure the linear-in-time decay of ||u(t) - r F||^2 along exact
inviscid solutions, for several multiples r, and print measured vs
predicted slopes."""

import argparse

import numpy as np

from burgers_lab.attractors import attractor_decay_series, attractor_distance, make_sawtooth, optimal_r
from burgers_lab.characteristics import InitialField, tmax_inviscid
from burgers_lab.spectral import SineSpectrum, sobolev_norm


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--amplitude", type=float, default=1.0, help="u0 = -R sin x")
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()

    u0 = InitialField(SineSpectrum.sine_wave(args.amplitude))
    energy0 = sobolev_norm(u0.spectrum, 0.0) ** 2
    t_max = tmax_inviscid(u0)
    scaling = optimal_r(u0.spectrum)
    print(f"u0 = -{args.amplitude:g} sin x   T_max = {t_max:.6f}   "
          f"r0 = {scaling.r0:.6f}   bound on T_max = {scaling.g_r0:.6f}")

    times = np.linspace(0.1, 0.9, args.points) * t_max
    for r in (0.5 * scaling.r0, scaling.r0, 2.0 * scaling.r0):
        table = attractor_decay_series(u0, times, r=r)
        d0 = attractor_distance(u0.spectrum, r)
        slope = np.polyfit(times, table.distance, 1)[0]
        print(f"r = {r:.6f}:  D(0) = {d0:.6f}  measured slope = {slope:+.9f}  "
              f"predicted = {-r * energy0:+.9f}  max law error = "
              f"{np.max(np.abs(table.distance - (d0 - r * energy0 * times))):.2e}")

    saw = make_sawtooth()
    table = attractor_decay_series(u0, times, attractor=saw)
    table0 = attractor_decay_series(u0, [0.0], attractor=saw)
    margin = np.min(table0.distance[0] - saw.slope_floor * times - table.distance)
    print(f"sawtooth profile: D(0) = {table0.distance[0]:.6f}, "
          f"upper-bound margin min over t = {margin:.6f} (>= 0 expected)")


if __name__ == "__main__":
    main()
