"""Desk-scale checks of the packing lemmas and the binomial ratio inequality."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DomainError

FULL_SCAN_LIMIT = 200_000


@dataclass(frozen=True)
class PackingResult:
    points: np.ndarray  # (m, d) entries in {-1, 0, 1}
    min_pairwise_hamming: int | None
    lower_bound: float
    satisfied: bool
    threshold: float
    complete: bool
    main_block: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def to_row(self) -> dict:
        return {
            "size": self.size,
            "lower_bound": self.lower_bound,
            "min_hamming": self.min_pairwise_hamming,
            "threshold": self.threshold,
            "complete": self.complete,
            "satisfied": self.satisfied,
        }


def packing_bound(slots: int, k: int) -> float:
    """``exp((k/2) log((slots - k/2) / k))``."""
    return math.exp(0.5 * k * math.log((slots - 0.5 * k) / k))


def _candidates(d: int, k: int):
    """Sign vectors with exactly ``k`` nonzeros, one block per support.

    Supports come in lexicographic order and sign patterns within a support
    in lexicographic order over ``(-1, +1)``.
    """
    signs = np.array(list(itertools.product((-1, 1), repeat=k)), dtype=np.int8)
    for supp in itertools.combinations(range(d), k):
        block = np.zeros((signs.shape[0], d), dtype=np.int8)
        block[:, supp] = signs
        yield block


def greedy_packing(
    d: int, k: int, threshold: float, stop_at: int | None = None
) -> tuple[np.ndarray, bool]:
    """Admit candidates in order if their Hamming distance to every admitted
    point exceeds ``threshold``. Returns the points and whether the scan
    ran to the end (False when it stopped after ``stop_at`` points)."""
    admitted = np.zeros((0, d), dtype=np.int8)
    for block in _candidates(d, k):
        if admitted.shape[0]:
            dist = (block[:, None, :] != admitted[None, :, :]).sum(axis=2)
            block = block[dist.min(axis=1) > threshold]
        for row in block:
            if admitted.shape[0] and (admitted != row).sum(axis=1).min() <= threshold:
                continue
            admitted = np.vstack([admitted, row])
            if stop_at is not None and admitted.shape[0] >= stop_at:
                return admitted, False
    return admitted, True


def min_hamming(points: np.ndarray) -> int | None:
    m = points.shape[0]
    if m < 2:
        return None
    best = points.shape[1] + 1
    for i in range(m - 1):
        best = min(best, int((points[i + 1 :] != points[i]).sum(axis=1).min()))
    return best


def _packing(d: int, k: int, stop_at_bound: bool | None) -> PackingResult:
    bound = packing_bound(d, k)
    threshold = k / 2
    if stop_at_bound is None:
        stop_at_bound = math.comb(d, k) * 2**k > FULL_SCAN_LIMIT
    stop_at = max(1, math.ceil(bound)) if stop_at_bound else None
    points, complete = greedy_packing(d, k, threshold, stop_at)
    return PackingResult(
        points, min_hamming(points), bound, points.shape[0] >= bound, threshold, complete
    )


def verify_packing_H1(r1: int, r2: int, stop_at_bound: bool | None = None) -> PackingResult:
    """Greedy Hamming packing of sign vectors with ``r2`` interactions among
    the ``C(r1, 2)`` pairs of a fixed block of ``r1`` active mains.

    Points are recorded over the interaction slots only; the main block is
    the same for every point and does not affect distances. By default the
    scan stops once the lemma's bound is met if the candidate set exceeds
    ``FULL_SCAN_LIMIT``; ``stop_at_bound=False`` forces a full scan.
    """
    slots = math.comb(r1, 2)
    if r1 < 2 or r2 < 1:
        raise DomainError("need r1 >= 2 and r2 >= 1")
    if 3 * r2 > 2 * slots:
        raise DomainError(f"need r2 <= (2/3) C(r1,2) = {2 * slots / 3:.3f}")
    if slots > 24:
        raise DomainError("C(r1,2) above 24 is beyond desk scale")
    res = _packing(slots, r2, stop_at_bound)
    return PackingResult(
        res.points, res.min_pairwise_hamming, res.lower_bound, res.satisfied,
        res.threshold, res.complete, (1,) * r1,
    )


def verify_packing_H2(r1: int, p: int, stop_at_bound: bool | None = None) -> PackingResult:
    """Greedy Hamming packing of main-effect sign vectors with ``r1`` nonzeros."""
    if r1 < 1:
        raise DomainError("need r1 >= 1")
    if 3 * r1 > 2 * p:
        raise DomainError(f"need r1 <= 2p/3 = {2 * p / 3:.3f}")
    if p > 20:
        raise DomainError("p above 20 is beyond desk scale")
    return _packing(p, r1, stop_at_bound)


@dataclass(frozen=True)
class BinomialRatio:
    A: int
    B: int
    lhs: float
    rhs: float
    ok: bool
    exact_ok: bool


def binomial_ratio_bound(A: int, B: int) -> BinomialRatio:
    """``C(A,B) / C(A,B/2)`` against ``((A - B/2) / B)^(B/2)``."""
    if B < 0 or B % 2 or 3 * B > 2 * A:
        raise DomainError(f"need even 0 <= B <= 2A/3, got A={A}, B={B}")
    half = B // 2
    log_lhs = math.log(math.comb(A, B)) - math.log(math.comb(A, half))
    log_rhs = half * math.log((A - half) / B) if B else 0.0
    ok = log_lhs >= log_rhs + math.log1p(-1e-12)
    exact_lhs = Fraction(math.comb(A, B), math.comb(A, half))
    exact_rhs = Fraction(A - half, B) ** half if B else Fraction(1)
    return BinomialRatio(A, B, math.exp(log_lhs), math.exp(log_rhs), ok, exact_lhs >= exact_rhs)


def epsilon_scale(points: np.ndarray, eps: float, k: int) -> np.ndarray:
    """Map sign vectors with ``k`` nonzeros to coefficients ``eps / sqrt(2k)``."""
    return np.asarray(points, dtype=float) * (eps / math.sqrt(2 * k))


def min_l2_separation(points: np.ndarray, eps: float, k: int) -> float:
    """Smallest pairwise l2 distance after ``epsilon_scale``.

    Hamming distance above ``k/2`` gives at least ``eps/2``; this raises
    when that fails.
    """
    scaled = epsilon_scale(points, eps, k)
    m = scaled.shape[0]
    if m < 2:
        return math.inf
    best = math.inf
    for i in range(m - 1):
        diff = scaled[i + 1 :] - scaled[i]
        best = min(best, float(np.sqrt((diff * diff).sum(axis=1)).min()))
    if best < eps / 2 * (1 - 1e-12):
        raise AssertionError(f"l2 separation {best} below eps/2 = {eps / 2}")
    return best


def log_ratio_claim(x: float) -> tuple[float, float]:
    """Both sides of ``log(x - 1/2) >= (1 + log x) / 10`` for ``x >= 2``."""
    if x < 2:
        raise DomainError("claim stated for x >= 2")
    return math.log(x - 0.5), 0.1 * (1.0 + math.log(x))


def packing_grid_H1(r1_max: int = 7):
    for r1 in range(2, r1_max + 1):
        slots = math.comb(r1, 2)
        for r2 in range(1, 2 * slots // 3 + 1):
            yield (r1, r2), verify_packing_H1(r1, r2)


def packing_grid_H2(p_max: int = 12):
    for p in range(2, p_max + 1):
        for r1 in range(1, 2 * p // 3 + 1):
            yield (r1, p), verify_packing_H2(r1, p)


def binomial_grid(A_max: int = 60):
    for A in range(0, A_max + 1):
        for B in range(0, 2 * A // 3 + 1, 2):
            yield binomial_ratio_bound(A, B)
