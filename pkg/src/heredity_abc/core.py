"""Models, heredity conditions and heredity-constrained enumeration.

Indices are 1-based throughout: main effects live in ``{1..p}`` and
interactions are pairs ``(i, j)`` with ``1 <= i < j <= p``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


class Heredity(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    NONE = "none"

    @classmethod
    def parse(cls, value: "str | Heredity") -> "Heredity":
        if isinstance(value, Heredity):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise DomainError(f"unknown heredity condition {value!r}") from None


Pair = tuple[int, int]


@dataclass(frozen=True, order=True)
class ModelIndex:
    """A candidate model: main-effect indices, interaction pairs, quadratics."""

    main: tuple[int, ...] = ()
    inter: tuple[Pair, ...] = ()
    quad: tuple[int, ...] = ()

    def __post_init__(self):
        main = tuple(sorted(int(i) for i in self.main))
        inter = tuple(sorted((int(i), int(j)) for i, j in self.inter))
        quad = tuple(sorted(int(i) for i in self.quad))
        if len(set(main)) != len(main) or len(set(quad)) != len(quad):
            raise DomainError("duplicate index in model")
        if len(set(inter)) != len(inter):
            raise DomainError("duplicate interaction pair in model")
        for i, j in inter:
            if not i < j:
                raise DomainError(f"interaction pair {(i, j)} must satisfy i < j")
        if any(i < 1 for i in main + quad) or any(i < 1 for i, _ in inter):
            raise DomainError("indices are 1-based")
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "inter", inter)
        object.__setattr__(self, "quad", quad)

    @property
    def k1(self) -> int:
        return len(self.main)

    @property
    def k2(self) -> int:
        return len(self.inter)

    @property
    def k3(self) -> int:
        return len(self.quad)

    @property
    def size(self) -> int:
        return self.k1 + self.k2 + self.k3

    def check(self, p: int) -> None:
        """Raise DomainError unless every index lies in ``{1..p}``."""
        top = max(
            [0, *self.main, *self.quad, *(j for _, j in self.inter)]
        )
        if top > p:
            raise DomainError(f"model index {top} out of range for p={p}")

    def sort_key(self) -> tuple:
        return (self.main, self.inter, self.quad)

    def to_dict(self) -> dict:
        return {
            "main": list(self.main),
            "inter": [list(pr) for pr in self.inter],
            "quad": list(self.quad),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelIndex":
        return cls(
            tuple(d.get("main", ())),
            tuple(tuple(pr) for pr in d.get("inter", ())),
            tuple(d.get("quad", ())),
        )

    @classmethod
    def full(cls, p: int) -> "ModelIndex":
        return cls(tuple(range(1, p + 1)), tuple(all_pairs(p)))


@dataclass(frozen=True)
class SparsityBudget:
    r1: int
    r2: int
    r3: int = 0

    def __post_init__(self):
        if min(self.r1, self.r2, self.r3) < 0:
            raise DomainError("sparsity budgets must be nonnegative")

    def check(self, p: int, n: int | None = None) -> None:
        if self.r1 > p or self.r3 > p or self.r2 > math.comb(p, 2):
            raise DomainError(f"budget {self} exceeds the dimension p={p}")
        if n is not None and self.r1 + self.r2 > n:
            raise DomainError(f"r1 + r2 = {self.r1 + self.r2} exceeds n={n}")


def n_pairs(p: int) -> int:
    return p * (p - 1) // 2


def all_pairs(p: int) -> Iterator[Pair]:
    """Interaction pairs in lexicographic order (1,2),(1,3),...,(p-1,p)."""
    return itertools.combinations(range(1, p + 1), 2)


def pair_position(i: int, j: int, p: int) -> int:
    """0-based position of pair (i, j) in the lexicographic pair order."""
    if not 1 <= i < j <= p:
        raise DomainError(f"pair {(i, j)} invalid for p={p}")
    return (i - 1) * (2 * p - i) // 2 + (j - i - 1)


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients on main effects, interactions (pair order) and quadratics."""

    beta_main: np.ndarray
    beta_inter: np.ndarray
    beta_quad: np.ndarray | None = None

    def __post_init__(self):
        bm = np.asarray(self.beta_main, dtype=float)
        bi = np.asarray(self.beta_inter, dtype=float)
        p = bm.shape[0]
        if bm.ndim != 1 or bi.shape != (n_pairs(p),):
            raise DomainError(
                f"expected {p} main and {n_pairs(p)} interaction coefficients"
            )
        object.__setattr__(self, "beta_main", bm)
        object.__setattr__(self, "beta_inter", bi)
        if self.beta_quad is not None:
            bq = np.asarray(self.beta_quad, dtype=float)
            if bq.shape != (p,):
                raise DomainError(f"expected {p} quadratic coefficients")
            object.__setattr__(self, "beta_quad", bq)

    @property
    def p(self) -> int:
        return self.beta_main.shape[0]

    def support(self) -> ModelIndex:
        p = self.p
        main = tuple(int(i) + 1 for i in np.flatnonzero(self.beta_main))
        pairs = list(all_pairs(p))
        inter = tuple(pairs[k] for k in np.flatnonzero(self.beta_inter))
        quad = ()
        if self.beta_quad is not None:
            quad = tuple(int(i) + 1 for i in np.flatnonzero(self.beta_quad))
        return ModelIndex(main, inter, quad)

    def values_on(self, m: ModelIndex) -> np.ndarray:
        """Coefficients restricted to ``m`` in column order main, inter, quad."""
        p = self.p
        vals = [self.beta_main[i - 1] for i in m.main]
        vals += [self.beta_inter[pair_position(i, j, p)] for i, j in m.inter]
        if m.quad:
            bq = self.beta_quad if self.beta_quad is not None else np.zeros(p)
            vals += [bq[i - 1] for i in m.quad]
        return np.asarray(vals, dtype=float)

    @classmethod
    def zeros(cls, p: int, quadratic: bool = False) -> "CoefficientVector":
        return cls(np.zeros(p), np.zeros(n_pairs(p)), np.zeros(p) if quadratic else None)

    @classmethod
    def from_model(
        cls, p: int, m: ModelIndex, values: Sequence[float] | float
    ) -> "CoefficientVector":
        m.check(p)
        vals = np.broadcast_to(np.asarray(values, dtype=float), (m.size,))
        bm, bi = np.zeros(p), np.zeros(n_pairs(p))
        bq = np.zeros(p) if m.quad else None
        it = iter(vals)
        for i in m.main:
            bm[i - 1] = next(it)
        for i, j in m.inter:
            bi[pair_position(i, j, p)] = next(it)
        for i in m.quad:
            bq[i - 1] = next(it)
        return cls(bm, bi, bq)


def is_admissible(m: ModelIndex, h: Heredity) -> bool:
    h = Heredity.parse(h)
    if h is Heredity.NONE:
        return True
    mains = set(m.main)
    if any(q not in mains for q in m.quad):
        return False
    if h is Heredity.STRONG:
        return all(i in mains and j in mains for i, j in m.inter)
    return all(i in mains or j in mains for i, j in m.inter)


def eligible_interaction_count(k1: int, p: int, h: Heredity) -> int:
    """Number of interaction slots available once ``k1`` mains are active."""
    h = Heredity.parse(h)
    if k1 < 0 or k1 > p:
        raise DomainError(f"need 0 <= k1 <= p, got k1={k1}, p={p}")
    if h is Heredity.STRONG:
        return math.comb(k1, 2)
    if h is Heredity.WEAK:
        return k1 * p - math.comb(k1, 2) - k1
    return n_pairs(p)


def eligible_pairs(main: Sequence[int], p: int, h: Heredity) -> list[Pair]:
    mains = set(main)
    if h is Heredity.STRONG:
        return [pr for pr in all_pairs(p) if pr[0] in mains and pr[1] in mains]
    if h is Heredity.WEAK:
        return [pr for pr in all_pairs(p) if pr[0] in mains or pr[1] in mains]
    return list(all_pairs(p))


def count_models(p: int, k1: int, k2: int, h: Heredity) -> int:
    """Exact number of admissible models with ``k1`` mains and ``k2`` pairs."""
    h = Heredity.parse(h)
    if k1 < 0 or k2 < 0 or k1 > p:
        return 0
    return math.comb(p, k1) * math.comb(eligible_interaction_count(k1, p, h), k2)


def enumerate_models(p: int, k1: int, k2: int, h: Heredity) -> Iterator[ModelIndex]:
    """Stream every admissible model of shape (k1, k2) in lexicographic order."""
    h = Heredity.parse(h)
    if k1 < 0 or k2 < 0 or k1 > p:
        return
    for main in itertools.combinations(range(1, p + 1), k1):
        pairs = eligible_pairs(main, p, h)
        for inter in itertools.combinations(pairs, k2):
            yield ModelIndex(main, inter)


def log_comb(a: int, b: int) -> float:
    """Natural log of C(a, b); ``-inf`` when the coefficient is zero."""
    if b < 0 or b > a:
        return -math.inf
    b = min(b, a - b)
    if b <= 64 or a <= 4096:
        return math.log(math.comb(a, b))
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)
