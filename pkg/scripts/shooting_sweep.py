"""Shoot the family F_lambda = 0 for a range of lambda and tabulate the invariants.

    python3 scripts/shooting_sweep.py --lam 2 3 4 6 8 --r-max 100 --csv shooting.csv
"""

import argparse
import csv
import sys

from hamstat.analysis import ShootingProblem, shoot_existence

FIELDS = ("lam", "delta", "r_reached", "min_v", "min_slope", "min_delta_margin", "max_log_growth_excess", "all_hold")


def sweep(lams, r_max):
    rows = []
    for lam in lams:
        prob = ShootingProblem(lam, r_max=r_max)
        traj, rep = shoot_existence(prob)
        holds = rep.v_at_least_one and rep.slope_positive and rep.delta_bound and rep.growth_bound
        rows.append({
            "lam": lam, "delta": prob.delta, "r_reached": rep.r_reached, "min_v": rep.min_v,
            "min_slope": rep.min_slope, "min_delta_margin": rep.min_delta_margin,
            "max_log_growth_excess": rep.max_log_growth_excess, "all_hold": holds,
        })
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, nargs="+", default=[2, 3, 4, 6, 8])
    ap.add_argument("--r-max", type=float, default=100.0)
    ap.add_argument("--csv", default=None, help="also write the table here")
    args = ap.parse_args(argv)
    rows = sweep(args.lam, args.r_max)
    print(f"{'lambda':>7} {'delta':>8} {'min v':>10} {'min dv':>10} {'margin':>10} {'growth':>10}  ok")
    for row in rows:
        print(f"{row['lam']:7g} {row['delta']:8.4f} {row['min_v']:10.6f} {row['min_slope']:10.3e} "
              f"{row['min_delta_margin']:10.3e} {row['max_log_growth_excess']:10.3e}  {row['all_hold']}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    return 0 if all(row["all_hold"] for row in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
