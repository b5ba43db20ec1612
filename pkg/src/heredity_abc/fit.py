"""Least-squares projection fits and prediction loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import CoefficientVector, DomainError, ModelIndex
from .spectral import DesignView, materialize_columns, rank_tolerance


@dataclass(frozen=True)
class FitResult:
    model: ModelIndex
    coef: np.ndarray
    yhat: np.ndarray
    rss: float
    rank: int


def lstsq_min_norm(Z: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Minimum-norm least squares by a complete orthogonal decomposition.

    Column-pivoted QR reveals the rank ``r``; the trailing rows of ``R`` are
    dropped and a second QR of ``R[:r].T`` gives the minimum-norm solution.
    Returns ``(coef, yhat, rank)``.
    """
    n, s = Z.shape
    if s == 0:
        return np.zeros(0), np.zeros(n), 0
    Q, R, piv = scipy.linalg.qr(Z, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    tol = rank_tolerance(n, s, diag[0]) if diag.size else 0.0
    r = int(np.count_nonzero(diag > tol))
    if r == 0:
        return np.zeros(s), np.zeros(n), 0
    Q1 = Q[:, :r]
    qty = Q1.T @ y
    yhat = Q1 @ qty
    R1 = R[:r, :]
    if r == s:
        z = scipy.linalg.solve_triangular(R1, qty, check_finite=False)
    else:
        W, L = scipy.linalg.qr(R1.T, mode="economic", check_finite=False)
        z = W @ scipy.linalg.solve_triangular(L, qty, trans="T", check_finite=False)
    coef = np.empty(s)
    coef[piv] = z
    return coef, yhat, r


def project(d: DesignView, m: ModelIndex, y: np.ndarray | None = None) -> FitResult:
    """Project ``y`` (default: the dataset response) onto the span of ``Z_I``."""
    y = d.data.y if y is None else np.asarray(y, dtype=float)
    if y.shape != (d.n,):
        raise DomainError(f"response must have length {d.n}")
    if not np.isfinite(y).all():
        raise DomainError("non-finite response")
    Z = materialize_columns(d, m)
    coef, yhat, rank = lstsq_min_norm(Z, y)
    resid = y - yhat
    return FitResult(m, coef, yhat, float(resid @ resid), rank)


def mean_vector(d: DesignView, beta: CoefficientVector) -> np.ndarray:
    """``Z beta`` built from the columns in the support of ``beta`` only."""
    if beta.p != d.p:
        raise DomainError("coefficient dimension does not match the design")
    supp = beta.support()
    if supp.size == 0:
        return np.zeros(d.n)
    return materialize_columns(d, supp) @ beta.values_on(supp)


def loss(d: DesignView, f: FitResult, beta_true: CoefficientVector) -> float:
    """Average squared error ``||yhat - Z beta_true||^2 / n``."""
    diff = f.yhat - mean_vector(d, beta_true)
    return float(diff @ diff) / d.n
