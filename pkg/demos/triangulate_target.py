#!/usr/bin/env python3
"""Locate a target from bearing-only sensor measurements.

Several ground sensors each report an azimuth/elevation pair toward the
same airborne target. No ranges are available, so the position is fixed
by intersecting the bearing rays with a damped Gauss-Newton solver.
"""

import argparse

import numpy as np

from sensorreg.geometry import cart_to_spherical
from sensorreg.triangulation import BearingSet, triangulate

SENSORS = np.array([
    [0.0, 0.0, 0.0],
    [8000.0, 1000.0, -30.0],
    [3000.0, 7000.0, -80.0],
])
TARGET = np.array([5000.0, 3000.0, -4000.0])


def bearings_from(locations, point, rng, sigma):
    az = np.empty(len(locations))
    el = np.empty(len(locations))
    for i, loc in enumerate(locations):
        meas = cart_to_spherical(point - loc)
        az[i] = meas.az + sigma * rng.normal()
        el[i] = meas.el + sigma * rng.normal()
    return BearingSet(locations=locations, az=az, el=el)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise-mrad", type=float, default=2.0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"true target position: {TARGET}")

    fix = triangulate(bearings_from(SENSORS, TARGET, rng, 0.0))
    print(f"noiseless fix:        {np.round(fix.point, 6)}"
          f"  (error {np.linalg.norm(fix.point - TARGET):.2e} m,"
          f" {fix.iterations} iterations)")

    sigma = args.noise_mrad * 1e-3
    fix = triangulate(bearings_from(SENSORS, TARGET, rng, sigma))
    print(f"noisy fix ({args.noise_mrad:.1f} mrad): {np.round(fix.point, 1)}"
          f"  (error {np.linalg.norm(fix.point - TARGET):.1f} m)")

    # accuracy degrades as the rays become more parallel
    print("\nerror vs target distance (fixed 2 mrad noise, same geometry):")
    for scale in (1.0, 2.0, 4.0, 8.0):
        far = TARGET * np.array([scale, scale, 1.0])
        fix = triangulate(bearings_from(SENSORS, far, rng, 2e-3))
        print(f"  range x{scale:<4.0f} error {np.linalg.norm(fix.point - far):10.1f} m")


if __name__ == "__main__":
    main()
