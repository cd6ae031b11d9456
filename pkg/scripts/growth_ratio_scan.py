#!/usr/bin/env python3
"""Terminal ratio log(log n_k)/sqrt(2k) of the growth model across k.

The ratio creeps toward its limit very slowly; this prints the mean and
spread at several depths so the drift is visible.

Example:
    python scripts/growth_ratio_scan.py --trials 20 --seed 12345
"""

import argparse
import sys

from emgraph.graph import simulate_growth_model


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--depths", type=int, nargs="*",
                    default=[10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6])
    args = ap.parse_args()

    print("k,mean_ratio,stddev")
    for k in args.depths:
        st = simulate_growth_model(k, args.trials, args.seed)
        print(f"{k},{st.mean:.5f},{st.stddev:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
