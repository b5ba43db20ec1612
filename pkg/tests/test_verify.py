import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heredity_abc.core import DomainError
from heredity_abc.verify import (
    binomial_ratio_bound,
    epsilon_scale,
    greedy_packing,
    log_ratio_claim,
    min_hamming,
    min_l2_separation,
    packing_bound,
    verify_packing_H1,
    verify_packing_H2,
)


def test_h1_example():
    res = verify_packing_H1(4, 2)
    assert res.lower_bound == pytest.approx(2.5)
    assert res.size >= 3
    assert res.complete
    assert res.min_pairwise_hamming > 1
    assert res.satisfied


def test_h1_single_interaction_takes_every_point():
    res = verify_packing_H1(5, 1)
    assert res.size == 2 * math.comb(5, 2)
    assert res.satisfied


def test_h2_examples():
    res = verify_packing_H2(2, 6)
    assert res.lower_bound == pytest.approx(2.5)
    assert res.size >= 3 and res.satisfied
    res = verify_packing_H2(1, 7)
    assert res.size == 14
    # +e_i and -e_i differ in one coordinate; distinct supports differ in two
    assert res.min_pairwise_hamming == 1 > res.threshold


def test_domain_limits():
    with pytest.raises(DomainError):
        verify_packing_H1(4, 5)
    with pytest.raises(DomainError):
        verify_packing_H2(5, 6)
    with pytest.raises(DomainError):
        binomial_ratio_bound(6, 3)


def test_greedy_is_deterministic():
    a = verify_packing_H1(5, 4).points
    b = verify_packing_H1(5, 4).points
    np.testing.assert_array_equal(a, b)


def naive_greedy(d, k, threshold):
    kept = []
    for supp in itertools.combinations(range(d), k):
        for signs in itertools.product((-1, 1), repeat=k):
            v = [0] * d
            for s, i in zip(signs, supp):
                v[i] = s
            if all(sum(a != b for a, b in zip(v, u)) > threshold for u in kept):
                kept.append(v)
    return np.array(kept, dtype=np.int8).reshape(-1, d)


@pytest.mark.parametrize("d,k", [(6, 2), (6, 3), (7, 4), (5, 1)])
def test_greedy_matches_naive_scan(d, k):
    got, complete = greedy_packing(d, k, k / 2)
    assert complete
    np.testing.assert_array_equal(got, naive_greedy(d, k, k / 2))


def test_min_hamming_exceeds_threshold_on_outputs():
    for r1 in range(2, 6):
        for r2 in range(1, 2 * math.comb(r1, 2) // 3 + 1):
            res = verify_packing_H1(r1, r2)
            if res.min_pairwise_hamming is not None:
                assert res.min_pairwise_hamming > r2 / 2


def test_binomial_examples():
    b = binomial_ratio_bound(6, 2)
    assert b.lhs == pytest.approx(2.5) and b.rhs == pytest.approx(2.5)
    assert b.ok and b.exact_ok
    b = binomial_ratio_bound(10, 0)
    assert b.lhs == 1.0 and b.rhs == 1.0 and b.ok


@pytest.mark.parametrize("A", range(0, 61))
def test_binomial_grid_exact(A):
    for B in range(0, 2 * A // 3 + 1, 2):
        b = binomial_ratio_bound(A, B)
        exact = Fraction(math.comb(A, B), math.comb(A, B // 2)) >= (
            Fraction(A - B // 2, B) ** (B // 2) if B else 1
        )
        assert exact and b.ok and b.exact_ok


def test_epsilon_scaling_separation():
    res = verify_packing_H1(5, 4)
    eps = 0.3
    sep = min_l2_separation(res.points, eps, 4)
    assert sep >= eps / 2
    scaled = epsilon_scale(res.points, eps, 4)
    assert np.linalg.norm(scaled, axis=1) == pytest.approx(eps / math.sqrt(2))


@pytest.mark.parametrize("x", np.linspace(2, 1000, 400))
def test_log_ratio_claim(x):
    lhs, rhs = log_ratio_claim(float(x))
    assert lhs >= rhs


def test_log_ratio_claim_domain():
    with pytest.raises(DomainError):
        log_ratio_claim(1.5)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_points_belong_to_declared_set(data):
    r1 = data.draw(st.integers(3, 6))
    r2 = data.draw(st.integers(1, 2 * math.comb(r1, 2) // 3))
    res = verify_packing_H1(r1, r2)
    assert res.main_block == (1,) * r1
    assert res.points.shape[1] == math.comb(r1, 2)
    assert set(np.unique(res.points)) <= {-1, 0, 1}
    assert (np.count_nonzero(res.points, axis=1) == r2).all()


def test_packing_bound_formula():
    assert packing_bound(6, 2) == pytest.approx(2.5)
    assert packing_bound(21, 14) == pytest.approx(math.exp(7 * math.log(14 / 14)))
    assert min_hamming(np.zeros((1, 3), dtype=np.int8)) is None
