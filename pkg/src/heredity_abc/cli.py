"""Command line entry point: ``heredity-abc {select,rates,verify,simulate}``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .core import Heredity
from .criterion import LAMBDA_MIN, ComplexityConfig, ComplexityTable, Family, kraft_check
from .harness import ExperimentConfig, rate_scaling_experiment
from .parallel import thread_count
from .rates import HEREDITIES, rate_report
from .search import DEFAULT_BUDGET_CAP, estimate_sigma2, select
from .spectral import DEFAULT_SAMPLED_BUDGET, Dataset, DesignView, load_dataset, src_check
from .verify import binomial_grid, packing_grid_H1, packing_grid_H2


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([[repr(v) if isinstance(v, float) else v for v in r] for r in rows])


def cmd_select(args) -> int:
    data = load_dataset(args.data, sigma2=args.sigma2 or 1.0, y_path=args.y_file, y_column=args.y_column)
    view = DesignView(data)
    sigma2 = args.sigma2
    if args.sigma2_plugin:
        sigma2 = estimate_sigma2(view)
    if sigma2 is None:
        raise SystemExit("--sigma2 is required (or pass --sigma2-plugin)")
    table = ComplexityTable.build(
        ComplexityConfig(data.p, data.n, lam=args.lam, theory_mode=args.lam >= LAMBDA_MIN)
    )
    families = None if args.heredity == "auto" else [Family.parse(args.heredity)]
    res = select(
        view, table, args.mode, budget_cap=args.budget_cap, sigma2=sigma2, families=families,
        iters=args.iters, restarts=args.restarts, seed=args.seed,
        threads=thread_count(args.threads),
    )
    payload = res.to_dict()
    payload["sigma2"] = sigma2
    payload["sigma2_plugin"] = bool(args.sigma2_plugin)
    payload["lambda"] = args.lam
    payload["kraft_renorm"] = table.renorm
    _emit(payload, args.out)
    return 0


def _heredities(value: str):
    return HEREDITIES if value == "all" else (Heredity.parse(value),)


def cmd_rates(args) -> int:
    hs = _heredities(args.heredity)
    if args.grid:
        with open(args.grid, newline="") as fh:
            grid = list(csv.DictReader(fh))
        header = ["n", "p", "r1", "r2", "r3", "sigma2", "scenario"]
        header += [f"rate_{h.value}" for h in hs] + ["strong_vs_weak", "strong_vs_none"]
        rows = []
        for g in grid:
            n, p, r1, r2 = (int(g[k]) for k in ("n", "p", "r1", "r2"))
            r3 = int(g["r3"]) if g.get("r3") not in (None, "") else None
            s2 = float(g["sigma2"]) if g.get("sigma2") not in (None, "") else args.sigma2
            rep = rate_report(n, p, r1, r2, s2, r3, hs)
            rows.append(
                [n, p, r1, r2, "" if r3 is None else r3, s2, rep.scenario.scenario]
                + [rep.rate[h.value] for h in hs]
                + [rep.ratios["strong_vs_weak"], rep.ratios["strong_vs_none"]]
            )
        if args.csv:
            _write_csv(args.csv, header, rows)
        else:
            w = csv.writer(sys.stdout, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        return 0
    if None in (args.n, args.p, args.r1, args.r2):
        raise SystemExit("--n, --p, --r1 and --r2 are required without --grid")
    rep = rate_report(args.n, args.p, args.r1, args.r2, args.sigma2, args.r3, hs)
    _emit(rep.to_dict(), args.out)
    return 0


def cmd_verify(args) -> int:
    header, rows, ok = [], [], True
    if args.check == "packing":
        header = ["lemma", "r1", "r2_or_p", "size", "lower_bound", "min_hamming", "complete", "satisfied"]
        for (r1, r2), res in packing_grid_H1(args.r1_max):
            rows.append(["H1", r1, r2, res.size, res.lower_bound, res.min_pairwise_hamming, res.complete, res.satisfied])
            ok &= res.satisfied
        for (r1, p), res in packing_grid_H2(args.p_max):
            rows.append(["H2", r1, p, res.size, res.lower_bound, res.min_pairwise_hamming, res.complete, res.satisfied])
            ok &= res.satisfied
    elif args.check == "binomial":
        header = ["A", "B", "lhs", "rhs", "ok"]
        for b in binomial_grid(args.a_max):
            rows.append([b.A, b.B, b.lhs, b.rhs, b.ok and b.exact_ok])
            ok &= b.ok and b.exact_ok
    elif args.check == "kraft":
        header = ["p", "n", "raw_sum", "renorm", "sum", "ok"]
        for p in range(args.p_min, args.p_max + 1):
            for n in args.n:
                rep = kraft_check(ComplexityTable.build(ComplexityConfig(p, n)))
                rows.append([p, n, rep.raw_sum, rep.renorm, rep.sum, rep.ok])
                ok &= rep.ok
    elif args.check == "src":
        data = load_dataset(args.data, y_path=args.y_file, y_column=args.y_column) if args.has_y else None
        if data is None:
            from .spectral import read_matrix_csv
            import numpy as np

            X, _ = read_matrix_csv(args.data)
            data = Dataset(X, np.zeros(X.shape[0]))
        cert = src_check(
            DesignView(data, args.quadratic), args.l1, args.l2, args.l3, args.mode,
            args.budget, args.seed, thread_count(args.threads),
        )
        header = ["l1", "l2", "l3", "mode", "n_supports", "b1_hat", "b2_hat", "ok"]
        ok = cert.b1_hat > args.b1
        rows.append([cert.l1, cert.l2, cert.l3, cert.mode, cert.n_supports, cert.b1_hat, cert.b2_hat, ok])
        if args.out:
            _emit(cert.to_dict(), args.out)
    if args.csv:
        _write_csv(args.csv, header, rows)
    failed = sum(1 for r in rows if r[-1] is False)
    print(f"{args.check}: {len(rows)} checks, {failed} failed")
    return 0 if ok else 1


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.output:
        cfg.output = args.output
    if args.threads is not None:
        cfg.threads = args.threads
    cfg.threads = thread_count(cfg.threads)
    rows = rate_scaling_experiment(cfg)
    print(f"wrote {len(rows)} cells to {cfg.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heredity-abc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("select", help="ABC model selection on a CSV dataset")
    s.add_argument("--data", required=True)
    s.add_argument("--y-file")
    s.add_argument("--y-column", type=int, default=-1)
    s.add_argument("--sigma2", type=float)
    s.add_argument("--sigma2-plugin", action="store_true",
                   help="estimate sigma2 from full-model residuals (outside the theory)")
    s.add_argument("--lambda", dest="lam", type=float, default=LAMBDA_MIN)
    s.add_argument("--heredity", choices=["auto", "strong", "weak", "none"], default="auto")
    s.add_argument("--mode", choices=["exhaustive", "stochastic"], default="exhaustive")
    s.add_argument("--iters", type=int, default=500)
    s.add_argument("--restarts", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget-cap", type=int, default=DEFAULT_BUDGET_CAP)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_select)

    r = sub.add_parser("rates", help="minimax rate shapes and scenario report")
    for flag in ("--n", "--p", "--r1", "--r2", "--r3"):
        r.add_argument(flag, type=int)
    r.add_argument("--sigma2", type=float, default=1.0)
    r.add_argument("--heredity", choices=["all", "strong", "weak", "none"], default="all")
    r.add_argument("--grid", help="CSV with columns n,p,r1,r2[,r3][,sigma2]")
    r.add_argument("--csv", help="write the grid sweep here")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rates)

    v = sub.add_parser("verify", help="check packing, binomial, Kraft and SRC conditions")
    vs = v.add_subparsers(dest="check", required=True)
    vp = vs.add_parser("packing")
    vp.add_argument("--r1-max", type=int, default=7)
    vp.add_argument("--p-max", type=int, default=12)
    vb = vs.add_parser("binomial")
    vb.add_argument("--a-max", type=int, default=60)
    vk = vs.add_parser("kraft")
    vk.add_argument("--p-min", type=int, default=3)
    vk.add_argument("--p-max", type=int, default=8)
    vk.add_argument("--n", type=int, nargs="+", default=[10, 20, 50])
    vr = vs.add_parser("src")
    vr.add_argument("--data", required=True)
    vr.add_argument("--has-y", action="store_true", help="the CSV also holds a response column")
    vr.add_argument("--y-file")
    vr.add_argument("--y-column", type=int, default=-1)
    vr.add_argument("--l1", type=int, default=1)
    vr.add_argument("--l2", type=int, default=0)
    vr.add_argument("--l3", type=int, default=0)
    vr.add_argument("--quadratic", action="store_true")
    vr.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    vr.add_argument("--budget", type=int, default=DEFAULT_SAMPLED_BUDGET)
    vr.add_argument("--seed", type=int, default=0)
    vr.add_argument("--b1", type=float, default=0.0, help="fail unless b1_hat exceeds this")
    vr.add_argument("--threads", type=int, default=1)
    vr.add_argument("--out")
    for p in (vp, vb, vk, vr):
        p.add_argument("--csv")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("simulate", help="Monte-Carlo risk versus minimax rate")
    m.add_argument("--config", required=True)
    m.add_argument("--output")
    m.add_argument("--threads", type=int)
    m.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
