#!/usr/bin/env python3
"""Census of equivalent-pair moduli in a range, with loop-base densities.

Example:
    python scripts/pair_census.py --hi 1000000 --coprime-to 1806 --workers 2

With --coprime-to 1806 (= 2*3*7*43) the output reproduces the known
coprime-modulus table once --hi is large enough to reach 2813785.
"""

import argparse
import sys
from collections import defaultdict

from emgraph import modsearch


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=int, default=2)
    ap.add_argument("--hi", type=int, required=True)
    ap.add_argument("--coprime-to", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--all-pairs", action="store_true",
                    help="include reducible pairs")
    args = ap.parse_args()

    cfg = modsearch.SearchConfig(
        lo=args.lo, hi=args.hi, coprime_to=args.coprime_to,
        irreducible_only=not args.all_pairs, worker_count=args.workers)
    groups = defaultdict(list)
    total = 0
    for rec in modsearch.search_range(cfg):
        groups[rec.modulus].append(rec)
        total += 1
    print("modulus,primes,residues,pairs,inverse_density")
    for m in sorted(groups):
        recs = groups[m]
        rep = modsearch.density_report(recs)
        residues = sorted({rc.a for r in recs for rc in r.residues})
        print(f"{m},{' '.join(str(p) for p in sorted(recs[0].p.primes))},"
              f"{' '.join(str(a) for a in residues)},{len(recs)},"
              f"{rep.inverse_density}")
    print(f"# {total} pairs over {len(groups)} moduli in "
          f"[{args.lo}, {args.hi}]", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
