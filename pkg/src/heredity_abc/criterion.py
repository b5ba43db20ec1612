"""ABC criterion and descriptive complexities of the candidate families.

The candidate family holds the full model plus, for every heredity
condition, all models with ``k1`` mains and ``k2`` admissible pairs in the
ranges below (``K`` is the number of eligible pairs):

* strong: ``1 <= k1 <= p^n``, ``0 <= k2 <= C(k1,2)^n``
* weak:   ``1 <= k1 <= p^n``, ``0 <= k2 <= K^n`` with ``K = k1 p - C(k1,2) - k1``
* none:   ``1 <= k1 <= p^n``, ``0 <= k2 <= C(p,2)^n``

The empty model is scored too, under the ``FULL`` slot with complexity
``-log(pi0) + log(p^n)``.

Two adjustments keep every complexity finite and the Kraft sum at most one:

* the ``log(K ^ n)`` term uses ``max(K ^ n, 1)``; for strong heredity with a
  single main effect ``C(1,2) = 0`` and only ``k2 = 0`` exists;
* when the exact sum of ``exp(-C_I)`` over the family exceeds one, every
  complexity is shifted by ``renorm = log(sum)``. A constant shift leaves the
  argmin of ABC unchanged.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .core import DomainError, Heredity, count_models, eligible_interaction_count, log_comb, n_pairs

LAMBDA_MIN = 5.1 / math.log(2)
KRAFT_TOL = 1e-12


class Family(enum.IntEnum):
    """Candidate families; the integer value is the tie-break order."""

    FULL = 0
    STRONG = 1
    WEAK = 2
    NONE = 3

    @property
    def heredity(self) -> Heredity | None:
        return {
            Family.STRONG: Heredity.STRONG,
            Family.WEAK: Heredity.WEAK,
            Family.NONE: Heredity.NONE,
        }.get(self)

    @classmethod
    def parse(cls, value: "str | Family | Heredity") -> "Family":
        if isinstance(value, Family):
            return value
        if isinstance(value, Heredity):
            value = value.value
        try:
            return cls[value.upper()]
        except KeyError:
            raise DomainError(f"unknown family {value!r}") from None


HEREDITY_FAMILIES = (Family.STRONG, Family.WEAK, Family.NONE)


@dataclass(frozen=True)
class ComplexityConfig:
    p: int
    n: int
    lam: float = LAMBDA_MIN
    pi: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    theory_mode: bool = True

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise DomainError("p and n must be positive")
        pi = tuple(float(v) for v in self.pi)
        if len(pi) != 4 or min(pi) <= 0:
            raise DomainError("need four positive prior weights pi0..pi3")
        if abs(math.fsum(pi) - 1.0) > 1e-12:
            raise DomainError(f"prior weights must sum to 1, got {math.fsum(pi)!r}")
        if self.lam <= 0:
            raise DomainError("lambda must be positive")
        if self.theory_mode and self.lam < LAMBDA_MIN:
            raise DomainError(f"lambda below {LAMBDA_MIN:.6f} voids the oracle bound")
        object.__setattr__(self, "pi", pi)


def k1_max(p: int, n: int) -> int:
    return min(p, n)


def eligible_k(family: Family, k1: int, p: int) -> int:
    return eligible_interaction_count(k1, p, family.heredity)


def k2_max(family: Family, k1: int, p: int, n: int) -> int:
    return min(eligible_k(family, k1, p), n)


def raw_complexity(cfg: ComplexityConfig, family: Family, k1: int, k2: int) -> float:
    """Complexity before the Kraft shift, natural logs."""
    family = Family.parse(family)
    p, n = cfg.p, cfg.n
    if family is Family.FULL:
        if k1 == 0 and k2 == 0:
            return -math.log(cfg.pi[0]) + math.log(min(p, n))
        return -math.log(cfg.pi[0])
    if not 1 <= k1 <= k1_max(p, n):
        raise DomainError(f"k1={k1} outside 1..{k1_max(p, n)}")
    K = eligible_k(family, k1, p)
    if not 0 <= k2 <= min(K, n):
        raise DomainError(f"k2={k2} outside 0..{min(K, n)} for {family.name.lower()}")
    return (
        -math.log(cfg.pi[int(family)])
        + math.log(min(p, n))
        + math.log(max(min(K, n), 1))
        + log_comb(p, k1)
        + log_comb(K, k2)
    )


def iter_shapes(p: int, n: int) -> Iterator[tuple[Family, int, int]]:
    """Every (family, k1, k2) cell of the candidate family, full model first."""
    yield Family.FULL, p, n_pairs(p)
    yield Family.FULL, 0, 0
    for fam in HEREDITY_FAMILIES:
        for k1 in range(1, k1_max(p, n) + 1):
            for k2 in range(k2_max(fam, k1, p, n) + 1):
                yield fam, k1, k2


def shape_count(p: int, family: Family, k1: int, k2: int) -> int:
    if family is Family.FULL:
        return 1
    return count_models(p, k1, k2, family.heredity)


def kraft_sum(terms) -> float:
    """``sum count * exp(-C)`` from ``(count, C)`` pairs, in the log domain.

    Each term is evaluated as ``exp(log(count) - C - shift)`` with the
    largest exponent as shift, then accumulated with ``math.fsum``.
    """
    logs = [math.log(c) - C for c, C in terms if c > 0]
    if not logs:
        return 0.0
    top = max(logs)
    return math.exp(top) * math.fsum(math.exp(v - top) for v in logs)


@dataclass(frozen=True)
class ComplexityTable:
    config: ComplexityConfig
    renorm: float = 0.0
    raw_sum: float = field(default=math.nan, compare=False)

    @classmethod
    def build(cls, config: ComplexityConfig, renormalize: bool = True) -> "ComplexityTable":
        s = kraft_sum(
            (shape_count(config.p, f, k1, k2), raw_complexity(config, f, k1, k2))
            for f, k1, k2 in iter_shapes(config.p, config.n)
        )
        renorm = math.log(s) if renormalize and s > 1.0 else 0.0
        return cls(config, renorm, s)

    @classmethod
    def default(cls, p: int, n: int, **kw) -> "ComplexityTable":
        return cls.build(ComplexityConfig(p, n, **kw))

    @property
    def lam(self) -> float:
        return self.config.lam


def complexity(t: ComplexityTable, family, k1: int, k2: int) -> float:
    """Descriptive complexity ``C_I`` of a model of shape (k1, k2) in ``family``.

    ``FULL`` ignores the shape except for ``(0, 0)``, which denotes the
    empty model.
    """
    return raw_complexity(t.config, Family.parse(family), k1, k2) + t.renorm


def abc(t: ComplexityTable, f, family, k1: int, k2: int, sigma2: float) -> float:
    """``rss + 2 rank sigma2 + lambda sigma2 C_I`` for the fit ``f``."""
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    return abc_value(f.rss, f.rank, complexity(t, family, k1, k2), t.lam, sigma2)


def abc_value(rss: float, rank: int, C: float, lam: float, sigma2: float) -> float:
    return rss + 2.0 * rank * sigma2 + lam * sigma2 * C


@dataclass(frozen=True)
class KraftReport:
    sum: float
    ok: bool
    raw_sum: float
    renorm: float


def kraft_check(t: ComplexityTable) -> KraftReport:
    cfg = t.config
    s = kraft_sum(
        (shape_count(cfg.p, f, k1, k2), complexity(t, f, k1, k2))
        for f, k1, k2 in iter_shapes(cfg.p, cfg.n)
    )
    return KraftReport(s, s <= 1.0 + KRAFT_TOL, t.raw_sum, t.renorm)


def export_complexity_csv(path: str | Path, t: ComplexityTable) -> None:
    cfg = t.config
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "k1", "k2", "count", "C"])
        for f, k1, k2 in iter_shapes(cfg.p, cfg.n):
            w.writerow(
                [f.name.lower(), k1, k2, shape_count(cfg.p, f, k1, k2),
                 repr(complexity(t, f, k1, k2))]
            )
