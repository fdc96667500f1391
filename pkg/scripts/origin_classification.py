"""Classify solutions at the origin: random C != 0 starts and the C = 0 quadratics.

Backward integrations from r0 = 1 with random (v, v') should all keep a
nonzero limit of v at 0. Quadratic potentials are special Lagrangian and
should come out as flat disks with the phase they were built with.
"""

import argparse
import collections
import math
import sys

import numpy as np

from hamstat.analysis import classify_origin, origin_sweep
from hamstat.closed_forms import make_quadratic
from hamstat.ode import trajectory_from_potential


def random_starts(count, seed, n, c):
    results, skipped = origin_sweep(count, seed=seed, n=n, c=c)
    verdicts = collections.Counter(r["verdict"] for r in results)
    limits = np.array([r["c_limit"] for r in results if isinstance(r["c_limit"], float)])
    print(f"n={n:g} C={c:g}: {len(results)} reached the origin, {len(skipped)} blew up first")
    for verdict, k in sorted(verdicts.items()):
        print(f"  {verdict:14s} {k}")
    if limits.size:
        print(f"  |lim v| in [{np.abs(limits).min():.4g}, {np.abs(limits).max():.4g}]")
    return verdicts


def quadratics(dims, thetas):
    radii = np.geomspace(1e-6, 1.0, 400)
    for n in dims:
        for theta in thetas:
            traj = trajectory_from_potential(make_quadratic(n, theta), radii)
            rep = classify_origin(traj)
            err = abs(rep.theta_const - theta) if rep.theta_const is not None else math.nan
            print(f"  quadratic n={n} theta0={theta:+.4f}: {rep.verdict.value:12s} |theta - theta0| = {err:.2e}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=float, default=3.0)
    ap.add_argument("--c", type=float, default=-2.0)
    args = ap.parse_args(argv)
    verdicts = random_starts(args.count, args.seed, args.n, args.c)
    print("special Lagrangian quadratics:")
    quadratics((2, 3, 4), (math.pi / 4, -math.pi / 4, math.pi / 2, -math.pi / 2))
    return 0 if "FlatDiskSL" not in verdicts else 1


if __name__ == "__main__":
    sys.exit(main())
