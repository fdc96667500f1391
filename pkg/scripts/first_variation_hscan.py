"""Central-difference first variation of the volume against the step h.

At a Hamiltonian stationary potential the difference quotient is pure
truncation error and should shrink by a factor of four per halving of h.
The cubic u = r^3 is not a solution and its value settles on a nonzero limit.
"""

import argparse
import math
import sys

from hamstat.analysis import Bump, first_variation
from hamstat.closed_forms import PowerLaw, RadialPotential, explicit_example, make_quadratic


def cases():
    yield "u=r n=3", explicit_example(3)[0]
    for n in (2, 3, 4):
        yield f"quadratic n={n} theta0=pi/4", make_quadratic(n, math.pi / 4)
    yield "u=r^3 n=3", RadialPotential(3, PowerLaw(3))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--center", type=float, default=1.0)
    ap.add_argument("--width", type=float, default=0.5)
    ap.add_argument("--profile", choices=("quartic", "bspline"), default="quartic")
    ap.add_argument("--h0", type=float, default=1e-3)
    ap.add_argument("--halvings", type=int, default=6)
    args = ap.parse_args(argv)
    bump = Bump(args.center, args.width, profile=args.profile)
    steps = [args.h0 / 2**k for k in range(args.halvings + 1)]
    for name, pot in cases():
        vals = [first_variation(pot, bump, h) for h in steps]
        print(name)
        prev = None
        for h, val in zip(steps, vals):
            ratio = f"{prev / val:8.4f}" if prev is not None and val != 0 else "       -"
            print(f"  h={h:.3e}  dF={val:+.6e}  ratio={ratio}")
            prev = val
    return 0


if __name__ == "__main__":
    sys.exit(main())
