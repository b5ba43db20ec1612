"""Design views over a fixed design and Sparse Riesz Condition checks."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

from .core import DomainError, ModelIndex, all_pairs, n_pairs

DEFAULT_SAMPLED_BUDGET = 10_000
_CHUNK = 1_000


@dataclass(frozen=True)
class Dataset:
    """Fixed design ``X`` (n x p), response ``y`` and known noise variance."""

    X: np.ndarray
    y: np.ndarray
    sigma2: float = 1.0

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DomainError(f"X must be a non-empty 2-d array, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise DomainError("X and y disagree on the number of rows")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DomainError("non-finite entries in data")
        if not math.isfinite(self.sigma2) or self.sigma2 < 0:
            raise DomainError("sigma2 must be finite and nonnegative")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class DesignView:
    """Columns of ``Z = (X, [XX])`` (and ``X^2`` when quadratic) on demand."""

    data: Dataset
    quadratic_enabled: bool = False

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def p(self) -> int:
        return self.data.p

    def column(self, j: int) -> np.ndarray:
        return self.data.X[:, j - 1]

    def interaction(self, i: int, j: int) -> np.ndarray:
        return self.data.X[:, i - 1] * self.data.X[:, j - 1]

    def square(self, i: int) -> np.ndarray:
        x = self.data.X[:, i - 1]
        return x * x

    def n_columns(self) -> int:
        return self.p + n_pairs(self.p) + (self.p if self.quadratic_enabled else 0)


def materialize_columns(d: DesignView, m: ModelIndex) -> np.ndarray:
    """Return ``Z_I``: mains ascending, then pairs lexicographic, then squares."""
    m.check(d.p)
    if m.quad and not d.quadratic_enabled:
        raise DomainError("quadratic terms requested on a non-quadratic design")
    X = d.data.X
    out = np.empty((d.n, m.size))
    k = 0
    if m.main:
        out[:, : m.k1] = X[:, [i - 1 for i in m.main]]
        k = m.k1
    if m.inter:
        a = np.fromiter((i - 1 for i, _ in m.inter), dtype=np.intp, count=m.k2)
        b = np.fromiter((j - 1 for _, j in m.inter), dtype=np.intp, count=m.k2)
        out[:, k : k + m.k2] = X[:, a] * X[:, b]
        k += m.k2
    if m.quad:
        q = [i - 1 for i in m.quad]
        out[:, k:] = X[:, q] * X[:, q]
    return out


def full_design(d: DesignView) -> np.ndarray:
    """The whole ``Z`` matrix; only sensible at small p."""
    p = d.p
    m = ModelIndex(
        tuple(range(1, p + 1)),
        tuple(all_pairs(p)),
        tuple(range(1, p + 1)) if d.quadratic_enabled else (),
    )
    return materialize_columns(d, m)


def normalize_columns(X: np.ndarray) -> np.ndarray:
    """Scale every column of ``X`` to Euclidean norm ``sqrt(n)``."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise DomainError("cannot normalize a zero column")
    return X * (math.sqrt(X.shape[0]) / norms)


def rank_tolerance(n: int, s: int, sigma_max: float) -> float:
    return max(n, s) * np.finfo(float).eps * sigma_max


@dataclass(frozen=True)
class SrcCertificate:
    l1: int
    l2: int
    l3: int
    b1_hat: float
    b2_hat: float
    mode: Literal["exhaustive", "sampled"]
    witness: ModelIndex | None
    witness_max: ModelIndex | None = None
    n_supports: int = 0
    seed: int | None = None
    notes: tuple[str, ...] = ()

    @property
    def exhaustive(self) -> bool:
        return self.mode == "exhaustive"

    def holds(self, b1: float = 0.0) -> bool:
        return self.b1_hat > b1

    def to_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "l3": self.l3,
            "b1_hat": self.b1_hat,
            "b2_hat": self.b2_hat,
            "mode": self.mode,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "witness_max": None if self.witness_max is None else self.witness_max.to_dict(),
            "n_supports": self.n_supports,
            "seed": self.seed,
            "notes": list(self.notes),
        }


def support_extremes(Z_I: np.ndarray) -> tuple[float, float]:
    """Smallest and largest singular value of ``Z_I / sqrt(n)``.

    With more columns than rows the smallest singular value is exactly 0.
    """
    n, s = Z_I.shape
    sv = np.linalg.svd(Z_I / math.sqrt(n), compute_uv=False)
    smin = 0.0 if s > n else float(sv[-1])
    return smin, float(sv[0])


def _caps(d: DesignView, l1: int, l2: int, l3: int) -> tuple[int, int, int]:
    p = d.p
    c3 = min(2 * l3, p) if d.quadratic_enabled else 0
    return min(2 * l1, p), min(2 * l2, n_pairs(p)), c3


def iter_supports(d: DesignView, l1: int, l2: int, l3: int = 0) -> Iterator[ModelIndex]:
    """All non-empty supports within the doubled budgets, deterministic order."""
    p = d.p
    c1, c2, c3 = _caps(d, l1, l2, l3)
    pairs = list(all_pairs(p))
    idx = range(1, p + 1)
    for a in range(c1 + 1):
        for b in range(c2 + 1):
            for c in range(c3 + 1):
                if a + b + c == 0:
                    continue
                for main in itertools.combinations(idx, a):
                    for inter in itertools.combinations(pairs, b):
                        for quad in itertools.combinations(idx, c):
                            yield ModelIndex(main, inter, quad)


def _sample_supports(
    d: DesignView, l1: int, l2: int, l3: int, count: int, rng: np.random.Generator
) -> list[ModelIndex]:
    p = d.p
    c1, c2, c3 = _caps(d, l1, l2, l3)
    P2 = n_pairs(p)
    shapes = [
        (a, b, c)
        for a in range(c1 + 1)
        for b in range(c2 + 1)
        for c in range(c3 + 1)
        if a + b + c > 0
    ]
    weights = np.array(
        [math.comb(p, a) * math.comb(P2, b) * math.comb(p, c) for a, b, c in shapes],
        dtype=float,
    )
    weights /= weights.sum()
    pairs = list(all_pairs(p))
    out = []
    for k in rng.choice(len(shapes), size=count, p=weights):
        a, b, c = shapes[k]
        main = tuple(int(i) + 1 for i in rng.choice(p, size=a, replace=False))
        inter = tuple(pairs[int(i)] for i in rng.choice(P2, size=b, replace=False))
        quad = tuple(int(i) + 1 for i in rng.choice(p, size=c, replace=False))
        out.append(ModelIndex(main, inter, quad))
    return out


def _scan(d: DesignView, supports) -> tuple[float, float, ModelIndex | None, ModelIndex | None, int]:
    b1, b2 = math.inf, 0.0
    w1 = w2 = None
    count = 0
    for m in supports:
        count += 1
        smin, smax = support_extremes(materialize_columns(d, m))
        if smin < b1:
            b1, w1 = smin, m
        if smax > b2:
            b2, w2 = smax, m
    return b1, b2, w1, w2, count


def src_check(
    d: DesignView,
    l1: int,
    l2: int,
    l3: int = 0,
    mode: Literal["exhaustive", "sampled"] = "exhaustive",
    budget: int = DEFAULT_SAMPLED_BUDGET,
    seed: int = 0,
    threads: int = 1,
) -> SrcCertificate:
    """Extremal singular values of ``Z_I / sqrt(n)`` over sparse supports.

    Exhaustive mode visits every support with at most ``min(2*l1, p)`` mains,
    ``min(2*l2, C(p,2))`` pairs and ``min(2*l3, p)`` squares. Sampled mode
    draws ``budget`` supports, with probability proportional to the number
    of supports of each shape, from independent per-chunk Philox streams.
    """
    if min(l1, l2, l3) < 0:
        raise DomainError("support budgets must be nonnegative")
    notes = []
    c1, c2, c3 = _caps(d, l1, l2, l3)
    if c1 + c2 + c3 > d.n:
        notes.append(
            f"largest support ({c1 + c2 + c3} columns) exceeds n={d.n}; b1_hat is 0"
        )
    if mode == "exhaustive":
        b1, b2, w1, w2, count = _scan(d, iter_supports(d, l1, l2, l3))
        used_seed = None
    elif mode == "sampled":
        if budget < 1:
            raise DomainError("sampled mode needs a positive budget")
        chunks = [min(_CHUNK, budget - s) for s in range(0, budget, _CHUNK)]
        streams = np.random.SeedSequence(seed).spawn(len(chunks))

        def work(k: int):
            rng = np.random.Generator(np.random.Philox(streams[k]))
            return _scan(d, _sample_supports(d, l1, l2, l3, chunks[k], rng))

        from .parallel import pmap

        parts = pmap(work, range(len(chunks)), threads)
        b1, b2, w1, w2, count = math.inf, 0.0, None, None, 0
        for pb1, pb2, pw1, pw2, pc in parts:
            count += pc
            if pb1 < b1:
                b1, w1 = pb1, pw1
            if pb2 > b2:
                b2, w2 = pb2, pw2
        used_seed = seed
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if count == 0:
        b1 = 0.0
    return SrcCertificate(
        l1, l2, l3, float(b1), float(b2), mode, w1, w2, count, used_seed, tuple(notes)
    )


def src_failure_witness(
    d: DesignView, b1: float, rtol: float = 1e-8
) -> tuple[int, int] | None:
    """A pair of main-effect columns that breaks the SRC lower bound ``b1``.

    Columns must share the norm ``sqrt(n)``. Two such columns with
    ``|cos| > 1 - b1**2`` admit a unit combination of length below ``b1``.
    The worst pair (largest ``|cos|``, first in pair order on ties) is
    returned, or ``None`` when every pair is acceptable.
    """
    X = d.data.X
    n, p = X.shape
    norms = np.linalg.norm(X, axis=0)
    if not np.allclose(norms, math.sqrt(n), rtol=rtol, atol=0):
        raise DomainError("columns must be normalized to norm sqrt(n)")
    if p < 2:
        return None
    cos = np.abs(X.T @ X) / n
    iu = np.triu_indices(p, k=1)
    vals = cos[iu]
    k = int(np.argmax(vals))
    if vals[k] > 1.0 - b1 * b1:
        return int(iu[0][k]) + 1, int(iu[1][k]) + 1
    return None


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_matrix_csv(path: str | Path) -> tuple[np.ndarray, list[str] | None]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = None
    if rows and not all(_is_number(c) for c in rows[0]):
        header, rows = rows[0], rows[1:]
    return np.array([[float(c) for c in r] for r in rows], dtype=float), header


def load_dataset(
    path: str | Path,
    sigma2: float = 1.0,
    y_path: str | Path | None = None,
    y_column: int = -1,
) -> Dataset:
    """Read a dataset from CSV; ``y`` is a column of ``path`` unless ``y_path``."""
    M, _ = read_matrix_csv(path)
    if y_path is not None:
        y, _ = read_matrix_csv(y_path)
        return Dataset(M, y.reshape(-1), sigma2)
    col = y_column % M.shape[1]
    X = np.delete(M, col, axis=1)
    return Dataset(X, M[:, col], sigma2)


def write_matrix_csv(path: str | Path, M: np.ndarray, header: list[str] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for row in np.atleast_2d(M):
            w.writerow([repr(float(v)) for v in row])


def export_design_csv(path: str | Path, d: DesignView, m: ModelIndex | None = None) -> None:
    """Write ``Z_I`` (or the full ``Z``) with term names as the header."""
    if m is None:
        p = d.p
        m = ModelIndex(
            tuple(range(1, p + 1)),
            tuple(all_pairs(p)),
            tuple(range(1, p + 1)) if d.quadratic_enabled else (),
        )
    names = [f"x{i}" for i in m.main]
    names += [f"x{i}:x{j}" for i, j in m.inter]
    names += [f"x{i}^2" for i in m.quad]
    write_matrix_csv(path, materialize_columns(d, m), names)
