import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heredity_abc.core import (
    CoefficientVector,
    DomainError,
    Heredity,
    ModelIndex,
    SparsityBudget,
    count_models,
    eligible_interaction_count,
    eligible_pairs,
    enumerate_models,
    is_admissible,
    log_comb,
    pair_position,
)

from oracles import admissible, brute_models

S, W, N = Heredity.STRONG, Heredity.WEAK, Heredity.NONE


def test_admissible_examples():
    assert is_admissible(ModelIndex((1, 2), ((1, 2),)), S)
    m = ModelIndex((1,), ((1, 2),))
    assert not is_admissible(m, S)
    assert is_admissible(m, W)
    assert is_admissible(ModelIndex((), ((1, 2),)), N)


def test_quadratic_needs_its_main_under_heredity():
    m = ModelIndex((1,), (), (2,))
    assert not is_admissible(m, S)
    assert not is_admissible(m, W)
    assert is_admissible(m, N)
    assert is_admissible(ModelIndex((2,), (), (2,)), S)


@pytest.mark.parametrize(
    "k1,p,h,expected", [(4, 10, S, 6), (2, 4, W, 5), (3, 5, N, 10), (0, 5, W, 0), (5, 5, W, 10)]
)
def test_eligible_count_examples(k1, p, h, expected):
    assert eligible_interaction_count(k1, p, h) == expected


def test_enumerate_examples():
    assert len(list(enumerate_models(4, 3, 1, S))) == 12
    assert list(enumerate_models(3, 0, 1, S)) == []
    assert len(list(enumerate_models(3, 1, 1, W))) == 6


@pytest.mark.parametrize("args,expected", [((4, 3, 1, S), 12), ((4, 2, 5, W), 6), ((5, 1, 0, N), 5)])
def test_count_examples(args, expected):
    assert count_models(*args) == expected


def test_count_infeasible_is_zero():
    assert count_models(4, 2, 2, S) == 0
    assert count_models(3, 5, 0, N) == 0


@pytest.mark.parametrize("p", range(1, 7))
@pytest.mark.parametrize("h", [S, W, N])
def test_count_matches_enumeration(p, h):
    P = p * (p - 1) // 2
    for k1 in range(p + 1):
        for k2 in range(P + 1):
            c = count_models(p, k1, k2, h)
            if c > 5000:
                assert c == math.comb(p, k1) * math.comb(eligible_interaction_count(k1, p, h), k2)
                continue
            models = list(enumerate_models(p, k1, k2, h))
            assert len(models) == c
            assert len(set(models)) == c


@pytest.mark.parametrize("p", [3, 4])
@pytest.mark.parametrize("h", ["strong", "weak", "none"])
def test_enumeration_matches_bitmask_oracle(p, h):
    P = p * (p - 1) // 2
    for k1 in range(p + 1):
        for k2 in range(P + 1):
            got = {(m.main, m.inter) for m in enumerate_models(p, k1, k2, Heredity(h))}
            assert got == set(brute_models(p, h, k1, k2))


def test_enumeration_is_lexicographic():
    models = list(enumerate_models(5, 2, 2, W))
    assert models == sorted(models, key=ModelIndex.sort_key)


@pytest.mark.parametrize("p", range(2, 6))
def test_heredity_nesting(p):
    P = p * (p - 1) // 2
    for k1 in range(p + 1):
        for k2 in range(P + 1):
            s = set(enumerate_models(p, k1, k2, S))
            w = set(enumerate_models(p, k1, k2, W))
            n = set(enumerate_models(p, k1, k2, N))
            assert s <= w <= n


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_admissible_agrees_with_oracle(data):
    p = data.draw(st.integers(2, 6))
    main = data.draw(st.sets(st.integers(1, p)))
    pairs = [(i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)]
    inter = data.draw(st.sets(st.sampled_from(pairs)))
    m = ModelIndex(tuple(main), tuple(inter))
    for h in ("strong", "weak", "none"):
        assert is_admissible(m, Heredity(h)) == admissible(main, inter, h)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.data())
def test_eligible_pairs_length(p, data):
    k1 = data.draw(st.integers(0, p))
    main = tuple(range(1, k1 + 1))
    for h in (S, W, N):
        assert len(eligible_pairs(main, p, h)) == eligible_interaction_count(k1, p, h)


def test_pair_position_is_lexicographic():
    p = 6
    pairs = [(i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)]
    assert [pair_position(i, j, p) for i, j in pairs] == list(range(len(pairs)))


def test_model_index_validation():
    m = ModelIndex((3, 1), ((2, 3), (1, 2)))
    assert m.main == (1, 3) and m.inter == ((1, 2), (2, 3))
    with pytest.raises(DomainError):
        ModelIndex((1, 1))
    with pytest.raises(DomainError):
        ModelIndex((), ((2, 1),))
    with pytest.raises(DomainError):
        ModelIndex((0,))
    with pytest.raises(DomainError):
        ModelIndex((5,)).check(4)
    assert ModelIndex.from_dict(m.to_dict()) == m


def test_sparsity_budget():
    SparsityBudget(2, 1).check(4, 10)
    with pytest.raises(DomainError):
        SparsityBudget(-1, 0)
    with pytest.raises(DomainError):
        SparsityBudget(3, 4).check(4, 6)


def test_coefficient_vector_roundtrip():
    m = ModelIndex((1, 3), ((1, 3),))
    b = CoefficientVector.from_model(4, m, [1.0, -2.0, 0.5])
    assert b.support() == m
    np.testing.assert_array_equal(b.values_on(m), [1.0, -2.0, 0.5])


def test_log_comb():
    assert log_comb(10, 3) == pytest.approx(math.log(120), rel=1e-15)
    assert log_comb(5, 0) == 0.0
    big = log_comb(10**7, 5000)
    assert big == pytest.approx(
        math.lgamma(10**7 + 1) - math.lgamma(5001) - math.lgamma(10**7 - 5000 + 1), rel=1e-12
    )
    assert log_comb(3, 4) == -math.inf


def test_heredity_parse():
    assert Heredity.parse("Strong") is S
    with pytest.raises(DomainError):
        Heredity.parse("partial")
