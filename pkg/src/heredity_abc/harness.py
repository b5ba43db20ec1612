"""Data generation and Monte-Carlo risk of the ABC estimator."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .core import CoefficientVector, DomainError, Heredity, ModelIndex, all_pairs, is_admissible, n_pairs
from .criterion import LAMBDA_MIN, ComplexityConfig, ComplexityTable, Family
from .fit import loss, mean_vector, project
from .parallel import pmap
from .rates import minimax_rate
from .search import RNG_NAME, CandidateBudgetExceeded, select_exhaustive, select_stochastic
from .spectral import Dataset, DesignView

CSV_COLUMNS = ("n", "p", "r1", "r2", "heredity", "risk", "se", "rate", "ratio", "seed")
_DESIGN_STREAM = 1 << 30


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for the stream ``key`` under ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def true_beta(
    p: int, r1: int, r2: int, heredity: Heredity = Heredity.STRONG, scale: float = 3.0
) -> CoefficientVector:
    """Truth with mains ``1..r1`` and ``r2`` pairs that fit ``heredity``.

    Strong picks pairs among the active mains. Weak prefers pairs with one
    active parent, none prefers pairs with no active parent, so the truth is
    not also admissible under a stricter condition when avoidable.
    """
    heredity = Heredity.parse(heredity)
    if r1 > p:
        raise DomainError("r1 exceeds p")
    mains = set(range(1, r1 + 1))
    pairs = list(all_pairs(p))
    inside = [pr for pr in pairs if pr[0] in mains and pr[1] in mains]
    one = [pr for pr in pairs if (pr[0] in mains) != (pr[1] in mains)]
    outside = [pr for pr in pairs if pr[0] not in mains and pr[1] not in mains]
    pool = {
        Heredity.STRONG: inside,
        Heredity.WEAK: one + inside,
        Heredity.NONE: outside + one + inside,
    }[heredity]
    if r2 > len(pool):
        raise DomainError(f"r2={r2} too large for {heredity.value} truth with r1={r1}, p={p}")
    m = ModelIndex(tuple(sorted(mains)), tuple(pool[:r2]))
    return CoefficientVector.from_model(p, m, scale)


def draw_design(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, p))


def generate(
    n: int,
    p: int,
    beta: CoefficientVector,
    sigma2: float,
    seed: int | np.random.Generator,
    X: np.ndarray | None = None,
) -> Dataset:
    """``y = Z beta + eps`` with ``eps ~ N(0, sigma2 I)``.

    ``X`` defaults to i.i.d. standard normal entries drawn first from the
    seeded stream; the noise is drawn after it.
    """
    if sigma2 < 0:
        raise DomainError("sigma2 must be nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(int(seed))
    if X is None:
        X = draw_design(n, p, rng)
    X = np.asarray(X, dtype=float)
    if X.shape != (n, p):
        raise DomainError(f"design must be {n}x{p}")
    mu = mean_vector(DesignView(Dataset(X, np.zeros(n), sigma2)), beta)
    eps = rng.standard_normal(n) * math.sqrt(sigma2)
    return Dataset(X, mu + eps, sigma2)


@dataclass
class ExperimentConfig:
    n_grid: Sequence[int] = (50, 100, 200, 400)
    p_grid: Sequence[int] = (8,)
    sparsity: Sequence[tuple[int, int]] = ((2, 1),)
    heredity: str = "strong"
    beta_scale: float = 3.0
    sigma2: float = 1.0
    replications: int = 100
    seed: int = 0
    selector: Literal["exhaustive", "stochastic", "oracle"] = "stochastic"
    candidates: str = "auto"
    iters: int = 500
    restarts: int = 3
    lam: float = LAMBDA_MIN
    redraw_design: bool = False
    budget_cap: int = 2_000_000
    output: str = "risk.csv"
    threads: int = 1

    def __post_init__(self):
        self.n_grid = tuple(int(v) for v in self.n_grid)
        self.p_grid = tuple(int(v) for v in self.p_grid)
        self.sparsity = tuple((int(a), int(b)) for a, b in self.sparsity)
        Heredity.parse(self.heredity)
        if self.replications < 1:
            raise DomainError("need at least one replication")
        if self.selector not in ("exhaustive", "stochastic", "oracle"):
            raise DomainError(f"unknown selector {self.selector!r}")
        for n in self.n_grid:
            for r1, r2 in self.sparsity:
                if r1 + r2 > n:
                    raise DomainError(f"r1 + r2 = {r1 + r2} exceeds n = {n}")

    def families(self) -> tuple[Family, ...] | None:
        if self.candidates == "auto":
            return None
        return (Family.parse(self.candidates),)

    def cells(self) -> list[tuple[int, int, int, int]]:
        return [
            (n, p, r1, r2)
            for p in self.p_grid
            for r1, r2 in self.sparsity
            for n in self.n_grid
        ]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["p_grid"] = list(self.p_grid)
        d["sparsity"] = [list(s) for s in self.sparsity]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "r1" in d or "r2" in d:
            d["sparsity"] = [(d.pop("r1"), d.pop("r2"))]
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    se: float
    losses: np.ndarray
    histogram: dict[tuple[str, int, int], int]
    # share of replications whose selected model contains the true support
    coverage: float = math.nan

    @property
    def replications(self) -> int:
        return self.losses.shape[0]


class ReplicationError(RuntimeError):
    def __init__(self, replication: int, cause: Exception):
        super().__init__(f"replication {replication}: {cause}")
        self.replication = replication


def summarize(
    losses: Sequence[float], histogram: Counter | dict, coverage: float = math.nan
) -> RiskEstimate:
    arr = np.asarray(losses, dtype=float)
    R = arr.shape[0]
    mean = math.fsum(arr) / R
    se = float(np.std(arr, ddof=1) / math.sqrt(R)) if R > 1 else 0.0
    return RiskEstimate(mean, se, arr, dict(sorted(histogram.items())), coverage)


def estimate_risk(
    cfg: ExperimentConfig, n: int, p: int, r1: int, r2: int, cell: int = 0
) -> RiskEstimate:
    """Mean prediction loss of the configured selector over replications.

    The design is drawn once per cell (fixed design) unless
    ``cfg.redraw_design``; replication ``r`` draws its noise from the Philox
    stream ``(seed, cell, r)``, so results do not depend on scheduling.
    """
    beta = true_beta(p, r1, r2, cfg.heredity, cfg.beta_scale * math.sqrt(cfg.sigma2))
    support = beta.support()
    X_fixed = None if cfg.redraw_design else draw_design(n, p, rng_for(cfg.seed, cell, _DESIGN_STREAM))
    table = ComplexityTable.build(ComplexityConfig(p, n, lam=cfg.lam, theory_mode=False))
    fams = cfg.families()

    def one(r: int):
        rng = rng_for(cfg.seed, cell, r)
        X = draw_design(n, p, rng) if X_fixed is None else X_fixed
        data = generate(n, p, beta, cfg.sigma2, rng, X=X)
        search_seed = int(rng.integers(1 << 62))
        view = DesignView(data)
        try:
            if cfg.selector == "oracle":
                fit, tag = project(view, support), ("oracle", support.k1, support.k2)
            elif cfg.selector == "exhaustive":
                res = select_exhaustive(view, table, cfg.budget_cap, families=fams)
                fit, tag = res.fit, (res.family.name.lower(), res.k1, res.k2)
            else:
                res = select_stochastic(
                    view, table, cfg.iters, cfg.restarts, seed=search_seed, families=fams
                )
                fit, tag = res.fit, (res.family.name.lower(), res.k1, res.k2)
        except CandidateBudgetExceeded as e:
            raise ReplicationError(r, e) from e
        covers = set(support.main) <= set(fit.model.main) and set(support.inter) <= set(fit.model.inter)
        return loss(view, fit, beta), tag, covers

    out = pmap(one, range(cfg.replications), cfg.threads)
    hist = Counter(tag for _, tag, _ in out)
    covered = sum(c for _, _, c in out) / len(out)
    return summarize([l for l, _, _ in out], hist, covered)


def rate_scaling_experiment(cfg: ExperimentConfig, write: bool = True) -> list[dict]:
    """Empirical risk against the minimax rate over every grid cell."""
    rows, meta = [], []
    for cell, (n, p, r1, r2) in enumerate(cfg.cells()):
        est = estimate_risk(cfg, n, p, r1, r2, cell)
        rate = minimax_rate(cfg.heredity, n, p, r1, r2, cfg.sigma2)
        rows.append({
            "n": n, "p": p, "r1": r1, "r2": r2, "heredity": Heredity.parse(cfg.heredity).value,
            "risk": est.mean, "se": est.se, "rate": rate, "ratio": est.mean / rate,
            "seed": cfg.seed,
        })
        meta.append({
            "cell": cell, "n": n, "p": p, "r1": r1, "r2": r2,
            "coverage": est.coverage,
            "histogram": [[f, k1, k2, c] for (f, k1, k2), c in est.histogram.items()],
        })
    if write:
        write_rows(cfg.output, rows)
        sidecar = Path(cfg.output).with_suffix(".json")
        # thread count is an execution detail; leaving it out keeps the file thread-invariant
        config = {k: v for k, v in cfg.to_dict().items() if k != "threads"}
        sidecar.write_text(
            json.dumps({"config": config, "rng": RNG_NAME, "cells": meta},
                       sort_keys=True, indent=2) + "\n"
        )
    return rows


def write_rows(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for c in ("n", "p", "r1", "r2", "seed"):
            row[c] = int(row[c])
        for c in ("risk", "se", "rate", "ratio"):
            row[c] = float(row[c])
    return rows


def log_log_slope(rows: list[dict]) -> float:
    """Least-squares slope of ``log(risk)`` on ``log(rate)``."""
    x = np.log([r["rate"] for r in rows])
    y = np.log([r["risk"] for r in rows])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
