"""Run the packing and binomial checks over their desk-scale grids.

    python scripts/packing_grid.py --r1-max 7 --p-max 12 --a-max 60 --csv packing.csv
"""

import argparse
import csv
import time

from heredity_abc.verify import binomial_grid, packing_grid_H1, packing_grid_H2


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--r1-max", type=int, default=7)
    ap.add_argument("--p-max", type=int, default=12)
    ap.add_argument("--a-max", type=int, default=60)
    ap.add_argument("--csv")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = []
    for (r1, r2), res in packing_grid_H1(args.r1_max):
        rows.append(("H1", r1, r2, res.size, res.lower_bound, res.min_pairwise_hamming, res.complete, res.satisfied))
    for (r1, p), res in packing_grid_H2(args.p_max):
        rows.append(("H2", r1, p, res.size, res.lower_bound, res.min_pairwise_hamming, res.complete, res.satisfied))
    binom = list(binomial_grid(args.a_max))

    bad = [r for r in rows if not r[-1]]
    bad_b = [(b.A, b.B) for b in binom if not (b.ok and b.exact_ok)]
    for lemma in ("H1", "H2"):
        sub = [r for r in rows if r[0] == lemma]
        slack = min(r[3] / r[4] for r in sub)
        print(f"{lemma}: {len(sub)} cells, smallest size/bound {slack:.3f}")
    print(f"binomial: {len(binom)} (A, B) pairs")
    print(f"failures: {len(bad) + len(bad_b)}  ({time.perf_counter() - t0:.1f}s)")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lemma", "r1", "r2_or_p", "size", "lower_bound", "min_hamming", "complete", "satisfied"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
