"""ABC model selection over the candidate family: exhaustive and stochastic."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .core import DomainError, Heredity, ModelIndex, all_pairs, eligible_pairs, enumerate_models, is_admissible, n_pairs
from .criterion import (
    HEREDITY_FAMILIES,
    ComplexityTable,
    Family,
    abc_value,
    complexity,
    iter_shapes,
    k1_max,
    k2_max,
    shape_count,
)
from .fit import FitResult, project
from .parallel import pmap
from .spectral import DesignView

DEFAULT_BUDGET_CAP = 2_000_000
RNG_NAME = "numpy.random.Philox(SeedSequence)"


class CandidateBudgetExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(
            f"{count} candidate models exceed the exhaustive cap of {cap}; "
            "use stochastic search instead"
        )
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class SelectionResult:
    model: ModelIndex
    family: Family
    k1: int
    k2: int
    abc_value: float
    fit: FitResult
    mode: Literal["exhaustive", "stochastic"]
    visited: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "family": self.family.name.lower(),
            "k1": self.k1,
            "k2": self.k2,
            "abc_value": self.abc_value,
            "rss": self.fit.rss,
            "rank": self.fit.rank,
            "coef": [float(v) for v in self.fit.coef],
            "mode": self.mode,
            "visited": self.visited,
            "seed": self.seed,
        }


def selection_key(value: float, rank: int, model: ModelIndex, family: Family) -> tuple:
    """Total order used for argmin: ABC, rank, size, model, family."""
    return (value, rank, model.size, model.sort_key(), int(family))


def _allowed_families(families: Iterable[Family] | None) -> tuple[Family, ...]:
    if families is None:
        return HEREDITY_FAMILIES
    fams = tuple(sorted({Family.parse(f) for f in families} - {Family.FULL}))
    return fams


def candidate_count(p: int, n: int, families: Iterable[Family] | None = None) -> int:
    fams = set(_allowed_families(families)) | {Family.FULL}
    return sum(
        shape_count(p, f, k1, k2) for f, k1, k2 in iter_shapes(p, n) if f in fams
    )


def estimate_sigma2(d: DesignView) -> float:
    """Residual variance of the full model; a plug-in outside the theory."""
    f = project(d, ModelIndex.full(d.p))
    dof = d.n - f.rank
    if dof <= 0:
        raise DomainError("full model interpolates the data; cannot estimate sigma2")
    return f.rss / dof


class _Scorer:
    """Fits keyed by model; only ``(rss, rank)`` is cached."""

    def __init__(self, d: DesignView, t: ComplexityTable, sigma2: float):
        if not sigma2 > 0:
            raise DomainError("sigma2 must be positive")
        if t.config.p != d.p or t.config.n != d.n:
            raise DomainError("complexity table built for a different (p, n)")
        self.d, self.t, self.sigma2 = d, t, sigma2
        self.cache: dict[ModelIndex, tuple[float, int]] = {}

    def rss_rank(self, m: ModelIndex) -> tuple[float, int]:
        hit = self.cache.get(m)
        if hit is None:
            f = project(self.d, m)
            hit = self.cache[m] = (f.rss, f.rank)
        return hit

    def score(self, m: ModelIndex, family: Family) -> tuple[float, int]:
        rss, rank = self.rss_rank(m)
        C = complexity(self.t, family, m.k1, m.k2)
        return abc_value(rss, rank, C, self.t.lam, self.sigma2), rank

    def key(self, m: ModelIndex, family: Family) -> tuple:
        v, rank = self.score(m, family)
        return selection_key(v, rank, m, family)


def _fixed_candidates(p: int) -> list[tuple[ModelIndex, Family]]:
    return [(ModelIndex.full(p), Family.FULL), (ModelIndex(), Family.FULL)]


def _result(d, best_key, best_model, best_family, mode, visited, seed) -> SelectionResult:
    fit = project(d, best_model)
    return SelectionResult(
        best_model, best_family, best_model.k1, best_model.k2, best_key[0], fit,
        mode, visited, seed,
    )


def _scan_shape(d, t, sigma2, k1, k2, fams) -> tuple[tuple | None, int]:
    """Fit each model of shape (k1, k2) once; score it in every family it joins."""
    p, n = d.p, d.n
    best = None
    visited = 0
    joins = [f for f in fams if k2 <= k2_max(f, k1, p, n)]
    if not joins:
        return None, 0
    for m in enumerate_models(p, k1, k2, max(joins).heredity):
        rss = rank = None
        for fam in joins:
            if not is_admissible(m, fam.heredity):
                continue
            if rss is None:
                f = project(d, m)
                rss, rank = f.rss, f.rank
            v = abc_value(rss, rank, complexity(t, fam, k1, k2), t.lam, sigma2)
            key = selection_key(v, rank, m, fam)
            visited += 1
            if best is None or key < best[0]:
                best = (key, m, fam)
    return best, visited


def select_exhaustive(
    d: DesignView,
    t: ComplexityTable,
    budget_cap: int = DEFAULT_BUDGET_CAP,
    sigma2: float | None = None,
    families: Iterable[Family] | None = None,
    threads: int = 1,
) -> SelectionResult:
    """Global ABC minimizer over the candidate family.

    Every model admissible for the loosest requested family is fitted once
    and scored under each family whose ranges and heredity it satisfies, so
    duplicates across families are scored independently without refitting.
    ``families`` restricts the heredity families (the full and empty models
    always compete).
    """
    sigma2 = d.data.sigma2 if sigma2 is None else sigma2
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    p, n = d.p, d.n
    fams = _allowed_families(families)
    total = candidate_count(p, n, fams)
    if total > budget_cap:
        raise CandidateBudgetExceeded(total, budget_cap)

    scorer = _Scorer(d, t, sigma2)
    best = None
    for m, fam in _fixed_candidates(p):
        key = scorer.key(m, fam)
        if best is None or key < best[0]:
            best = (key, m, fam)
    visited = 2

    shapes = [
        (k1, k2)
        for k1 in range(1, k1_max(p, n) + 1)
        for k2 in range(max(k2_max(f, k1, p, n) for f in fams) + 1)
    ]
    parts = pmap(lambda s: _scan_shape(d, t, sigma2, s[0], s[1], fams), shapes, threads)
    for part, count in parts:
        visited += count
        if part is not None and part[0] < best[0]:
            best = part
    return _result(d, best[0], best[1], best[2], "exhaustive", visited, None)


def _forward_path_start(scorer: _Scorer, fam: Family) -> tuple[ModelIndex, tuple]:
    """Best-ABC model on the forward-stepwise path under ``fam``.

    Each step adds the main or admissible pair whose column most reduces
    the residual sum of squares (Gram-Schmidt on all columns at once). Every
    path model whose shape lies in the family's ranges is scored; the path
    runs to ``min(n - 1, p + C(p,2))`` terms so it crosses shapes where the
    complexity is locally high.
    """
    d = scorer.d
    p, n = d.p, d.n
    pairs = list(all_pairs(p))
    X = d.data.X
    W = np.column_stack([X] + ([X[:, [i - 1 for i, _ in pairs]] * X[:, [j - 1 for _, j in pairs]]]
                               if pairs else []))
    norm0 = (W * W).sum(axis=0)
    resid = np.array(d.data.y, dtype=float)
    taken = np.zeros(W.shape[1], dtype=bool)
    mains: list[int] = []
    inter: list[tuple[int, int]] = []
    best = None
    for _ in range(min(n - 1, W.shape[1])):
        in_main = np.zeros(p + 1, dtype=bool)
        in_main[mains] = True
        allowed = ~taken
        if pairs and fam is not Family.NONE:
            a = in_main[[i for i, _ in pairs]]
            b = in_main[[j for _, j in pairs]]
            allowed[p:] &= (a & b) if fam is Family.STRONG else (a | b)
        nrm = (W * W).sum(axis=0)
        allowed &= nrm > 1e-10 * np.maximum(norm0, np.finfo(float).tiny)
        if not allowed.any():
            break
        gain = np.where(allowed, (W.T @ resid) ** 2 / np.where(allowed, nrm, 1.0), -1.0)
        j = int(np.argmax(gain))
        q = W[:, j] / math.sqrt(nrm[j])
        resid -= q * (q @ resid)
        W -= np.outer(q, q @ W)
        taken[j] = True
        if j < p:
            mains.append(j + 1)
        else:
            inter.append(pairs[j - p])
        m = ModelIndex(tuple(mains), tuple(inter))
        if 1 <= m.k1 <= k1_max(p, n) and m.k2 <= k2_max(fam, m.k1, p, n):
            key = scorer.key(m, fam)
            if best is None or key < best[0]:
                best = (key, m)
    if best is None:
        m = ModelIndex((1,))
        return m, scorer.key(m, fam)
    return best[1], best[0]


def _propose(
    main: tuple[int, ...], inter: tuple, fam: Family, p: int, n: int,
    rng: np.random.Generator,
) -> ModelIndex | None:
    """One random move; ``None`` when the move is impossible or inadmissible."""
    move = int(rng.integers(6))
    mains = list(main)
    pairs = list(inter)
    outside = [j for j in range(1, p + 1) if j not in main]
    if move == 0:  # add main
        if not outside:
            return None
        mains.append(outside[int(rng.integers(len(outside)))])
    elif move == 1:  # drop main
        if len(mains) <= 1:
            return None
        mains.pop(int(rng.integers(len(mains))))
    elif move == 2:  # swap main
        if not outside:
            return None
        mains[int(rng.integers(len(mains)))] = outside[int(rng.integers(len(outside)))]
    else:
        if move in (3, 5):
            elig = [pr for pr in eligible_pairs(main, p, fam.heredity) if pr not in inter]
            if not elig:
                return None
            new = elig[int(rng.integers(len(elig)))]
        if move == 3:  # add interaction
            pairs.append(new)
        elif not pairs:
            return None
        elif move == 4:  # drop interaction
            pairs.pop(int(rng.integers(len(pairs))))
        else:  # swap interaction
            pairs[int(rng.integers(len(pairs)))] = new
    m = ModelIndex(tuple(mains), tuple(pairs))
    if not 1 <= m.k1 <= k1_max(p, n) or m.k2 > k2_max(fam, m.k1, p, n):
        return None
    if not is_admissible(m, fam.heredity):
        return None
    return m


def _descend(scorer: _Scorer, fam: Family, start: ModelIndex, start_key: tuple,
             iters: int, rng: np.random.Generator) -> tuple[tuple, ModelIndex]:
    p, n = scorer.d.p, scorer.d.n
    cur, cur_key = start, start_key
    for _ in range(iters):
        cand = _propose(cur.main, cur.inter, fam, p, n, rng)
        if cand is None:
            continue
        key = scorer.key(cand, fam)
        if key[0] < cur_key[0]:
            cur, cur_key = cand, key
    return cur_key, cur


def select_stochastic(
    d: DesignView,
    t: ComplexityTable,
    iters: int = 500,
    restarts: int = 5,
    seed: int = 0,
    sigma2: float | None = None,
    families: Iterable[Family] | None = None,
    threads: int = 1,
) -> SelectionResult:
    """Greedy random descent with restarts, separately within each family.

    Each (family, restart) task starts from the best model on the family's
    forward-stepwise path (see ``_forward_path_start``), proposes ``iters`` random add/drop/swap moves on mains and pairs,
    skips moves that break the family's heredity or ranges, and accepts a
    move only when ABC strictly decreases. Task ``(f, r)`` draws from its own
    Philox stream keyed by ``(seed, f, r)``, so the result does not depend
    on ``threads``. The full and empty models are always scored.
    """
    if iters < 1:
        raise DomainError("iters must be at least 1")
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    sigma2 = d.data.sigma2 if sigma2 is None else sigma2
    fams = _allowed_families(families)
    scorer = _Scorer(d, t, sigma2)
    best = None
    for m, fam in _fixed_candidates(d.p):
        key = scorer.key(m, fam)
        if best is None or key < best[0]:
            best = (key, m, fam)

    starts = {fam: _forward_path_start(scorer, fam) for fam in fams}
    tasks = [(fam, r) for fam in fams for r in range(restarts)]

    def run(task):
        fam, r = task
        ss = np.random.SeedSequence(seed, spawn_key=(int(fam), r))
        rng = np.random.Generator(np.random.Philox(ss))
        start, start_key = starts[fam]
        key, m = _descend(scorer, fam, start, start_key, iters, rng)
        return key, m, fam

    for cand in pmap(run, tasks, threads):
        if cand[0] < best[0]:
            best = cand
    return _result(d, best[0], best[1], best[2], "stochastic", len(scorer.cache), seed)


def select(
    d: DesignView,
    t: ComplexityTable,
    mode: Literal["exhaustive", "stochastic"] = "exhaustive",
    **kw,
) -> SelectionResult:
    if mode == "exhaustive":
        keep = {"budget_cap", "sigma2", "families", "threads"}
        return select_exhaustive(d, t, **{k: v for k, v in kw.items() if k in keep})
    if mode == "stochastic":
        keep = {"iters", "restarts", "seed", "sigma2", "families", "threads"}
        return select_stochastic(d, t, **{k: v for k, v in kw.items() if k in keep})
    raise DomainError(f"unknown selection mode {mode!r}")
