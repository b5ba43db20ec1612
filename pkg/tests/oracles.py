"""Independent reference computations used by the tests.

Nothing here imports the package's enumeration, fitting or complexity code;
everything is rebuilt from bitmasks, dense matrices and the normal
equations.
"""

import itertools
import math

import numpy as np

LAM = 5.1 / math.log(2)


def pairs_of(p):
    return [(i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)]


def admissible(main, inter, kind):
    if kind == "none":
        return True
    if kind == "strong":
        return all(i in main and j in main for i, j in inter)
    return all(i in main or j in main for i, j in inter)


def brute_models(p, kind, k1=None, k2=None):
    """Every (main, inter) pair admissible under ``kind`` via bitmasks."""
    pr = pairs_of(p)
    out = []
    for mm in range(1 << p):
        main = tuple(i + 1 for i in range(p) if mm >> i & 1)
        if k1 is not None and len(main) != k1:
            continue
        for im in range(1 << len(pr)):
            inter = tuple(pr[b] for b in range(len(pr)) if im >> b & 1)
            if k2 is not None and len(inter) != k2:
                continue
            if admissible(set(main), inter, kind):
                out.append((main, inter))
    return out


def dense_Z(X):
    """Full design (X, [XX]) built column by column in pair order."""
    n, p = X.shape
    cols = [X[:, i] for i in range(p)]
    cols += [X[:, i - 1] * X[:, j - 1] for i, j in pairs_of(p)]
    return np.column_stack(cols)


def column_ids(p, main, inter):
    pr = pairs_of(p)
    return [i - 1 for i in main] + [p + pr.index(x) for x in inter]


def ne_fit(Z, y):
    """Normal-equation coefficients for a well-conditioned full-rank Z."""
    return np.linalg.solve(Z.T @ Z, Z.T @ y)


def lstsq_fit(Z, y):
    if Z.shape[1] == 0:
        return 0.0 + y @ y, 0
    coef, *_ = np.linalg.lstsq(Z, y, rcond=None)
    r = y - Z @ coef
    return float(r @ r), int(np.linalg.matrix_rank(Z))


def complexity_terms(p, n, fam, k1, k2, pi=(0.25,) * 4):
    """Complexity before any Kraft shift, straight from the formulas."""
    if fam == "full":
        c = -math.log(pi[0])
        return c + math.log(min(p, n)) if (k1, k2) == (0, 0) else c
    if fam == "strong":
        K, w = k1 * (k1 - 1) // 2, pi[1]
    elif fam == "weak":
        K, w = k1 * p - k1 * (k1 - 1) // 2 - k1, pi[2]
    else:
        K, w = p * (p - 1) // 2, pi[3]
    return (
        -math.log(w)
        + math.log(min(p, n))
        + math.log(max(min(K, n), 1))
        + math.log(math.comb(p, k1))
        + math.log(math.comb(K, k2))
    )


def family_candidates(p, n):
    """All (model, family) candidates, by brute force, with ranges applied."""
    full = (tuple(range(1, p + 1)), tuple(pairs_of(p)))
    out = [(full, "full"), (((), ()), "full")]
    for fam in ("strong", "weak", "none"):
        for main, inter in brute_models(p, fam):
            k1, k2 = len(main), len(inter)
            if not 1 <= k1 <= min(p, n):
                continue
            if fam == "strong":
                K = k1 * (k1 - 1) // 2
            elif fam == "weak":
                K = k1 * p - k1 * (k1 - 1) // 2 - k1
            else:
                K = p * (p - 1) // 2
            if k2 > min(K, n):
                continue
            out.append(((main, inter), fam))
    return out


FAM_ORDER = {"full": 0, "strong": 1, "weak": 2, "none": 3}


def brute_select(X, y, sigma2, lam=LAM):
    """Enumerate, fit, score with ABC, argmin with the documented tie-break."""
    n, p = X.shape
    Z = dense_Z(X)
    cands = family_candidates(p, n)
    Cs = [complexity_terms(p, n, fam, len(m[0]), len(m[1])) for m, fam in cands]
    total = math.fsum(math.exp(-c) for c in Cs)
    shift = math.log(total) if total > 1 else 0.0
    best = None
    for ((main, inter), fam), C in zip(cands, Cs):
        rss, rank = lstsq_fit(Z[:, column_ids(p, main, inter)], y)
        val = rss + 2 * rank * sigma2 + lam * sigma2 * (C + shift)
        key = (val, rank, len(main) + len(inter), (main, inter), FAM_ORDER[fam])
        if best is None or key < best[0]:
            best = (key, (main, inter), fam)
    return best


def svd_extremes_oracle(X, a_max, b_max):
    """Per-support SVD over the dense design for every support within budget."""
    n, p = X.shape
    Z = dense_Z(X) / math.sqrt(n)
    P = p * (p - 1) // 2
    lo, hi = math.inf, 0.0
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            if a + b == 0:
                continue
            for S in itertools.combinations(range(p), a):
                for T in itertools.combinations(range(P), b):
                    cols = list(S) + [p + t for t in T]
                    sv = np.linalg.svd(Z[:, cols], compute_uv=False)
                    smin = 0.0 if len(cols) > n else sv[-1]
                    lo, hi = min(lo, smin), max(hi, sv[0])
    return lo, hi
