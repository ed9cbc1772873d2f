"""Intermittent AWGN user against a Rayleigh user: outer boundary and both inner families.

The outer boundary is traced by the threshold state s_w in [0, s1*], using
the closed form and the numeric partition side by side.
"""

import argparse

import numpy as np

from fadingbc import FadingDist, bes_rates, example_assignments, outer_extreme_point
from fadingbc.gaussian import awgn_rayleigh_outer, db_to_linear, threshold_log_weight


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p1", type=float, default=0.4)
    ap.add_argument("--snr1-db", type=float, default=60.0)
    ap.add_argument("--gamma2-db", type=float, default=30.0)
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args(argv)

    p1, s1, g2 = args.p1, db_to_linear(args.snr1_db), db_to_linear(args.gamma2_db)
    S1, S2 = FadingDist.intermittent(p1, s1), FadingDist.rayleigh(g2)
    print("s_w, closed-form (R1, R2), numeric (R1, R2)")
    for so in np.concatenate(([0.0], np.geomspace(1.0, s1, args.points - 1))):
        exact = awgn_rayleigh_outer(p1, s1, g2, so)
        num = outer_extreme_point(S1, S2, log_omega=threshold_log_weight(p1, g2, so)).as_tuple()
        print(f"{so:12.4g}  ({exact[0]:.6f}, {exact[1]:.6f})  ({num[0]:.6f}, {num[1]:.6f})")
    for style in ("awgn_rayleigh_inner1", "awgn_rayleigh_inner2"):
        print(f"== {style} (with stripping)")
        for n2, a in enumerate(example_assignments(S1, S2, style)):
            r1, r2 = bes_rates(S1, S2, a, stripping=True)
            print(f"n2={n2:2d}  R1={r1:.4f}  R2={r2:.4f}")


if __name__ == "__main__":
    main()
