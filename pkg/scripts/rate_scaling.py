"""Empirical ABC risk against the minimax rate over a grid.

    python scripts/rate_scaling.py scripts/configs/risk_grid.json --output risk.csv
"""

import argparse
import time

from heredity_abc.harness import ExperimentConfig, log_log_slope, rate_scaling_experiment
from heredity_abc.parallel import thread_count


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--output")
    ap.add_argument("--replications", type=int)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    cfg = ExperimentConfig.from_json(args.config)
    if args.output:
        cfg.output = args.output
    if args.replications:
        cfg.replications = args.replications
    cfg.threads = thread_count(args.threads or cfg.threads)

    t0 = time.perf_counter()
    rows = rate_scaling_experiment(cfg)
    print(f"{'n':>5} {'p':>4} {'r1':>3} {'r2':>3} {'risk':>10} {'se':>9} {'rate':>9} {'ratio':>7}")
    for r in rows:
        print(f"{r['n']:>5} {r['p']:>4} {r['r1']:>3} {r['r2']:>3} "
              f"{r['risk']:>10.5f} {r['se']:>9.5f} {r['rate']:>9.5f} {r['ratio']:>7.3f}")
    ratios = [r["ratio"] for r in rows]
    print(f"max/min ratio {max(ratios) / min(ratios):.3f}")
    print(f"log-log slope {log_log_slope(rows):.3f}")
    print(f"wrote {cfg.output} in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
