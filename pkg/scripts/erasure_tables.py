"""Print the level tables and capacity regions of the two 2-bit erasure examples."""

from fadingbc import ErasurePmf, capacity_region, critical_weights, partition_levels

EXAMPLES = {
    "example 1": (ErasurePmf(2, (0.25, 0.5, 0.25)), ErasurePmf(2, (0.5, 0.0, 0.5))),
    "example 2": (ErasurePmf(2, (0.25, 0.75, 0.0)), ErasurePmf(2, (0.5, 0.0, 0.5))),
}


def main():
    for name, (n1, n2) in EXAMPLES.items():
        print(f"== {name}")
        print(" j  P(N1>=j)  P(N2>=j)")
        for j in range(1, n1.q + 1):
            print(f"{j:2d}  {n1.ccdf(j):8.4f}  {n2.ccdf(j):8.4f}")
        print("critical weights:", critical_weights(n1, n2))
        region = capacity_region(n1, n2)
        for (lo, hi), (r1, r2) in zip(region.omega_intervals(), region.extreme_points):
            w = lo + 1 if hi == float("inf") else 0.5 * (lo + hi)
            p = partition_levels(n1, n2, w)
            print(f"omega in [{lo:g}, {hi:g}]: user1={sorted(p.user1_levels)} user2={sorted(p.user2_levels)} -> ({r1:g}, {r2:g})")


if __name__ == "__main__":
    main()
