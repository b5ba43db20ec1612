import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heredity_abc.core import CoefficientVector, ModelIndex
from heredity_abc.fit import lstsq_min_norm, loss, mean_vector, project
from heredity_abc.spectral import Dataset, DesignView

from oracles import column_ids, dense_Z, ne_fit


def view(X, y):
    return DesignView(Dataset(X, y))


def test_square_full_rank_interpolates():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((3, 3))
    y = rng.standard_normal(3)
    f = project(view(X, y), ModelIndex((1, 2, 3)))
    np.testing.assert_allclose(f.yhat, y, rtol=1e-12, atol=1e-12)
    assert f.rss == pytest.approx(0.0, abs=1e-20)
    assert f.rank == 3


def test_empty_model():
    y = np.array([1.0, -2.0, 3.0])
    f = project(view(np.ones((3, 1)), y), ModelIndex())
    assert f.rss == pytest.approx(14.0)
    assert f.rank == 0


def test_normal_equations_oracle_6x2():
    rng = np.random.default_rng(62)
    X = rng.standard_normal((6, 2))
    y = rng.standard_normal(6)
    f = project(view(X, y), ModelIndex((1, 2)))
    np.testing.assert_allclose(f.coef, ne_fit(X, y), rtol=1e-10)


def test_rank_deficient_min_norm():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(8)
    Z = np.column_stack([x, x, rng.standard_normal(8)])
    y = rng.standard_normal(8)
    coef, yhat, rank = lstsq_min_norm(Z, y)
    ref = np.linalg.pinv(Z) @ y
    assert rank == 2
    np.testing.assert_allclose(coef, ref, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(yhat, Z @ ref, rtol=1e-9, atol=1e-12)


def test_loss_examples():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((10, 3))
    beta = CoefficientVector.from_model(3, ModelIndex((1, 2), ((1, 2),)), [1.0, -1.0, 2.0])
    d = view(X, np.zeros(10))
    d = view(X, mean_vector(d, beta))
    f = project(d, ModelIndex((1, 2), ((1, 2),)))
    assert loss(d, f, beta) == pytest.approx(0.0, abs=1e-20)
    y = rng.standard_normal(10)
    d = view(X, y)
    f = project(d, ModelIndex((1, 3)))
    assert loss(d, f, CoefficientVector.zeros(3)) == pytest.approx(f.yhat @ f.yhat / 10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(2, 6))
def test_loss_matches_dense_oracle(seed, p):
    rng = np.random.default_rng(seed)
    n = 30
    X = rng.standard_normal((n, p))
    Z = dense_Z(X)
    b = rng.standard_normal(Z.shape[1]) * (rng.random(Z.shape[1]) < 0.4)
    beta = CoefficientVector(b[:p], b[p:])
    y = rng.standard_normal(n)
    m = ModelIndex((1, 2), ((1, 2),))
    f = project(view(X, y), m)
    Zi = Z[:, column_ids(p, m.main, m.inter)]
    yhat = Zi @ ne_fit(Zi, y)
    expected = np.sum((yhat - Z @ b) ** 2) / n
    assert loss(view(X, y), f, beta) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_projection_invariants(seed):
    rng = np.random.default_rng(seed)
    n, p = 15, 4
    X = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    d = view(X, y)
    small = ModelIndex((1,), ())
    big = ModelIndex((1, 2), ((1, 2), (1, 3)))
    f = project(d, big)
    again = project(d, big, f.yhat)
    np.testing.assert_allclose(again.yhat, f.yhat, rtol=1e-8, atol=1e-10)
    assert f.yhat @ f.yhat + f.rss == pytest.approx(y @ y, rel=1e-10)
    assert project(d, small).rss >= f.rss - 1e-10
