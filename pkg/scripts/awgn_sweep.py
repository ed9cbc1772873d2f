"""Outer bound and BES inner bounds for the constant 20 dB / 10 dB channel pair.

Writes a CSV (omega, R1, R2, kind) suitable for plotting the three curves.
"""

import argparse
import csv
import sys

import numpy as np

from fadingbc import FadingDist, bes_rates, example_assignments, outer_region
from fadingbc.gaussian import db_to_linear


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr1-db", type=float, default=20.0)
    ap.add_argument("--snr2-db", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=64)
    args = ap.parse_args(argv)

    S1 = FadingDist.intermittent(1.0, db_to_linear(args.snr1_db))
    S2 = FadingDist.intermittent(1.0, db_to_linear(args.snr2_db))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["omega", "R1", "R2", "kind"])
    outer = outer_region(S1, S2, np.geomspace(1e-2, 1e2, args.points))
    for (lo, _), (r1, r2) in zip(outer.omega_intervals(), outer.extreme_points):
        w.writerow([lo, r1, r2, "outer"])
    for n2, a in enumerate(example_assignments(S1, S2, "threshold")):
        for stripping, kind in ((True, "inner-rs"), (False, "inner-nors")):
            r1, r2 = bes_rates(S1, S2, a, stripping)
            w.writerow([n2, r1, r2, kind])


if __name__ == "__main__":
    main()
