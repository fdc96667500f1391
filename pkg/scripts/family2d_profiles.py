"""Write CSV profiles of the two-dimensional special Lagrangian family.

Each profile starts at r = a with u'(a) = v0 and constant phase theta; the
files land in --out-dir as family2d_theta_<k>.csv with columns r, u, v, dv.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from hamstat.closed_forms import SL2D, ClosedForm2DParams


def profile(a, b, v0, theta, samples):
    form = SL2D(ClosedForm2DParams.from_anchor(a, 0.0, v0, theta, None))
    return [form.jet(float(r)) for r in np.linspace(a, b, samples)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=0.5)
    ap.add_argument("--b", type=float, default=5.0)
    ap.add_argument("--v0", type=float, default=0.3)
    ap.add_argument("--theta", type=float, nargs="+", default=[0.3, 0.7, 1.2, -0.7])
    ap.add_argument("--samples", type=int, default=201)
    ap.add_argument("--out-dir", default="family2d")
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, theta in enumerate(args.theta):
        jets = profile(args.a, args.b, args.v0, theta, args.samples)
        path = out / f"family2d_theta_{k}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("r", "u", "v", "dv"))
            for j in jets:
                writer.writerow([format(x, ".17g") for x in (j.r, j.u, j.up, j.upp)])
        print(f"theta={theta:+.3f}: v({args.b:g}) = {jets[-1].up:.6g} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
