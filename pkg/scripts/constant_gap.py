"""Tabulate the universal gap against the quantization constant and report its minimum."""

import numpy as np

from fadingbc import minimize_gap, universal_gap


def main():
    for g in np.geomspace(0.5, 50, 13):
        print(f"gamma={g:8.3f}  delta={universal_gap(g):.5f}")
    g, d = minimize_gap(0.5, 50.0)
    print(f"minimum: gamma*={g:.5f} delta*={d:.6f}")


if __name__ == "__main__":
    main()
