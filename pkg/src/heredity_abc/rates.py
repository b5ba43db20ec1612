"""Minimax-rate shapes under the three heredity conditions.

All logarithms are natural. Rates are reported up to the unknown
multiplicative constants, i.e. ``sigma2 / n * max(xi_main, xi_inter)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import DomainError, Heredity, eligible_interaction_count, n_pairs

BAND = 0.10
HEREDITIES = (Heredity.STRONG, Heredity.WEAK, Heredity.NONE)


def xi(b: float, a: float) -> float:
    """Search-plus-estimation price ``b (1 + log(a / b))`` of ``b`` terms out of ``a``."""
    if b < 0 or a < b:
        raise DomainError(f"xi needs 0 <= b <= a, got b={b}, a={a}")
    if b == 0:
        return 0.0
    return b * (1.0 + math.log(a / b))


def _check(n: int, p: int, r1: int, r2: int, sigma2: float = 1.0) -> None:
    if not 2 <= r1 <= p:
        raise DomainError(f"need 2 <= r1 <= p, got r1={r1}, p={p}")
    if r2 < 1:
        raise DomainError(f"need r2 >= 1, got {r2}")
    if r1 + r2 > n:
        raise DomainError(f"need r1 + r2 <= n, got {r1 + r2} > {n}")
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")


def interaction_slots(h: Heredity, p: int, r1: int) -> int:
    """Eligible interaction count given ``r1`` active mains.

    Weak heredity uses the exact count ``r1 p - C(r1,2) - r1`` (of order
    ``r1 p``), which keeps the slots nested across the three conditions.
    """
    return eligible_interaction_count(r1, p, Heredity.parse(h))


def price_terms(h: Heredity, p: int, r1: int, r2: int) -> tuple[float, float, int]:
    K = interaction_slots(h, p, r1)
    return xi(r1, p), xi(min(r2, K), K), K


def minimax_rate(h, n: int, p: int, r1: int, r2: int, sigma2: float = 1.0) -> float:
    _check(n, p, r1, r2, sigma2)
    main, inter, _ = price_terms(Heredity.parse(h), p, r1, r2)
    return sigma2 / n * max(main, inter)


def minimax_rate_quadratic(
    h, n: int, p: int, r1: int, r2: int, r3: int, sigma2: float = 1.0
) -> float:
    """Rate with up to ``r3`` quadratic terms.

    Under strong or weak heredity a square needs its own main effect, so
    the interaction-only rate of that condition is returned. Without
    heredity the main price uses ``max(r1, r3)`` terms.
    """
    _check(n, p, r1, r2, sigma2)
    if not 0 <= r3 <= p:
        raise DomainError(f"need 0 <= r3 <= p, got r3={r3}")
    h = Heredity.parse(h)
    if h is not Heredity.NONE:
        return minimax_rate(h, n, p, r1, r2, sigma2)
    rbar = max(r1, r3)
    K = n_pairs(p)
    return sigma2 / n * max(xi(rbar, p), xi(min(r2, K), K))


def crossover(target: float, a: float, tol: float = 1e-14) -> float | None:
    """Root ``r`` in ``(0, a]`` of ``xi(r, a) = target`` by bisection.

    ``xi(., a)`` increases strictly on ``(0, a]`` from 0 to ``a``; with
    ``target >= a`` there is no crossover and ``None`` is returned.
    """
    if target <= 0:
        return 0.0
    if target >= a:
        return None
    lo, hi = 0.0, float(a)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if xi(mid, a) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


def _near(u: float, v: float, band: float = BAND) -> bool:
    top = max(abs(u), abs(v))
    return top == 0 or abs(u - v) <= band * top


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    dominant: dict[str, str]
    r_star: float | None
    r_star_rounded: int | None
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "dominant": self.dominant,
            "r_star": self.r_star,
            "r_star_rounded": self.r_star_rounded,
            "flags": list(self.flags),
        }


def classify_scenario(n: int, p: int, r1: int, r2: int) -> ScenarioReport:
    """Finite-sample reading of the three regimes.

    S1 when ``r2 <= r1``; otherwise S2 when ``log p <= r1``, else S3. The
    crossover ``r_*`` solves ``xi(r_*, r1**2) = xi(r1, p)``. Comparisons that
    sit within 10% of each other are flagged since the regimes are order
    statements and not sharp at finite sizes.
    """
    _check(n, p, r1, r2)
    logp = math.log(p)
    if r2 <= r1:
        scenario = "S1"
    elif logp <= r1:
        scenario = "S2"
    else:
        scenario = "S3"
    flags = []
    if r2 != r1 and _near(r1, r2):
        flags.append("r2~r1")
    if _near(logp, r1):
        flags.append("log p~r1")
    dominant = {}
    for h in HEREDITIES:
        main, inter, _ = price_terms(h, p, r1, r2)
        dominant[h.value] = "main" if main >= inter else "interaction"
        if _near(main, inter):
            flags.append(f"xi_main~xi_inter[{h.value}]")
    r_star = crossover(xi(r1, p), float(r1 * r1))
    if r_star is None:
        flags.append("no crossover: xi(r1, p) >= r1^2")
    return ScenarioReport(
        scenario,
        dominant,
        r_star,
        None if r_star is None else int(round(r_star)),
        tuple(flags),
    )


def improvement_ratios(n: int, p: int, r1: int, r2: int) -> dict[str, float]:
    s = minimax_rate(Heredity.STRONG, n, p, r1, r2)
    return {
        "strong_vs_weak": s / minimax_rate(Heredity.WEAK, n, p, r1, r2),
        "strong_vs_none": s / minimax_rate(Heredity.NONE, n, p, r1, r2),
    }


@dataclass(frozen=True)
class RateReport:
    n: int
    p: int
    r1: int
    r2: int
    sigma2: float
    r3: int | None
    xi_main: float
    slots: dict[str, int]
    xi_inter: dict[str, float]
    rate: dict[str, float]
    scenario: ScenarioReport
    ratios: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "r1": self.r1,
            "r2": self.r2,
            "r3": self.r3,
            "sigma2": self.sigma2,
            "xi_main": self.xi_main,
            "K": self.slots,
            "xi_inter": self.xi_inter,
            "rate": self.rate,
            "scenario": self.scenario.to_dict(),
            "ratios": self.ratios,
        }


def rate_report(
    n: int, p: int, r1: int, r2: int, sigma2: float = 1.0,
    r3: int | None = None, heredities=HEREDITIES,
) -> RateReport:
    _check(n, p, r1, r2, sigma2)
    slots, xi_inter, rate = {}, {}, {}
    for h in heredities:
        h = Heredity.parse(h)
        _, inter, K = price_terms(h, p, r1, r2)
        slots[h.value], xi_inter[h.value] = K, inter
        if r3 is None:
            rate[h.value] = minimax_rate(h, n, p, r1, r2, sigma2)
        else:
            rate[h.value] = minimax_rate_quadratic(h, n, p, r1, r2, r3, sigma2)
    return RateReport(
        n, p, r1, r2, sigma2, r3, xi(r1, p), slots, xi_inter, rate,
        classify_scenario(n, p, r1, r2), improvement_ratios(n, p, r1, r2),
    )
