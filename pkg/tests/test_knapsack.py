import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from finmember.errors import CapExceeded, InputError
from finmember.instances import random_knapsack, random_perm
from finmember.knapsack import (
    KnapsackInstance, ZeroOneMatrix, check_kronecker_equivalence, cyclic_dlog, format_knapsack,
    kron, kronecker_factors_commute, parse_knapsack, permutation_matrix, solve_2_knapsack,
    solve_exhaustive, solve_k_knapsack, solve_knapsack, solve_subset_sum, vec,
)
from finmember.perm import Permutation, compose, power

from conftest import P, perms


def test_subset_sum_examples():
    a, b = P("(1 2)", 3), P("(2 3)", 3)
    inst = KnapsackInstance(3, compose(a, b), (a, b), "binary")
    assert solve_subset_sum(inst) == (1, 1)
    inst = KnapsackInstance(3, P("(1 3)", 3), (a, b), "binary")
    assert solve_subset_sum(inst) is None
    assert solve_knapsack(KnapsackInstance(3, P("(1 3 2)", 3), (P("(1 2 3)", 3),))) == (2,)


def test_empty_product_is_identity():
    inst = KnapsackInstance(2, Permutation.identity(2), (), "binary")
    assert solve_subset_sum(inst) == ()


def test_methods_agree_on_random_instances():
    rng = random.Random(5)
    for _ in range(150):
        inst = random_knapsack(rng, rng.randint(3, 5), rng.randint(0, 7), rng.random() < 0.5, "binary")
        sols = {m: solve_subset_sum(inst, m) for m in ("dp", "mitm", "exhaustive")}
        assert len({s is None for s in sols.values()}) == 1
        for s in sols.values():
            assert s is None or inst.verify(s)


def test_natural_knapsack_matches_exhaustive():
    rng = random.Random(6)
    for _ in range(100):
        inst = random_knapsack(rng, 4, rng.randint(1, 3), rng.random() < 0.5)
        a, b = solve_knapsack(inst), solve_exhaustive(inst)
        assert (a is None) == (b is None)
        assert a is None or inst.verify(a)


def test_planted_is_found():
    rng = random.Random(7)
    for _ in range(50):
        inst = random_knapsack(rng, 6, 4, planted=True)
        assert solve_knapsack(inst) is not None


def test_k_knapsack_checks_k():
    inst = KnapsackInstance(2, P("(1 2)", 2), (P("(1 2)", 2),))
    assert solve_k_knapsack(inst, 1) == (1,)
    with pytest.raises(InputError):
        solve_k_knapsack(inst, 2)


def test_cap():
    rng = random.Random(1)
    inst = random_knapsack(rng, 5, 30, domain="binary")
    with pytest.raises(CapExceeded):
        solve_subset_sum(inst, "exhaustive", cap=1000)


def test_parse_round_trip():
    inst = KnapsackInstance(4, P("(1 2)", 4), (P("(1 2 3)", 4), P("(3 4)", 4)))
    assert parse_knapsack(format_knapsack(inst)) == inst
    with pytest.raises(InputError):
        parse_knapsack("target (1 2)\n")


@given(perms(degree=6), st.integers(0, 80))
def test_cyclic_dlog_finds_least_exponent(c, y):
    b = power(c, y)
    assert cyclic_dlog(c, b) == y % c.order()


@given(perms(degree=5), perms(degree=5))
def test_cyclic_dlog_none_iff_not_a_power(c, b):
    powers = [power(c, y) for y in range(c.order())]
    r = cyclic_dlog(c, b)
    assert (r is None) == (b not in powers)
    if r is not None:
        assert power(c, r) == b


def test_2_knapsack_matches_general_solver():
    rng = random.Random(8)
    for _ in range(200):
        a1, a2 = random_perm(rng, 6), random_perm(rng, 6)
        a = compose(power(a1, rng.randrange(10)), power(a2, rng.randrange(10))) if rng.random() < .5 \
            else random_perm(rng, 6)
        sol = solve_2_knapsack(a1, a2, a)
        ref = solve_knapsack(KnapsackInstance(6, a, (a1, a2)))
        assert (sol is None) == (ref is None)
        if sol:
            assert compose(power(a1, sol[0]), power(a2, sol[1])) == a


def test_permutation_matrix_is_homomorphism():
    rng = random.Random(9)
    for _ in range(30):
        a, b = random_perm(rng, 5), random_perm(rng, 5)
        assert np.array_equal(permutation_matrix(compose(a, b)).data,
                              permutation_matrix(a).data @ permutation_matrix(b).data)
        assert permutation_matrix(a).is_permutation_matrix()


def test_kron_and_vec():
    x = ZeroOneMatrix(np.array([[0, 1], [1, 0]]))
    assert kron(x, ZeroOneMatrix.identity(1)) == x
    assert vec(ZeroOneMatrix(np.array([[1, 0], [1, 0]]))).tolist() == [1, 1, 0, 0]
    with pytest.raises(InputError):
        ZeroOneMatrix(np.array([[2]]))


def test_kronecker_equation():
    rng = random.Random(10)
    for _ in range(60):
        a1, a2 = random_perm(rng, 5), random_perm(rng, 5)
        assert kronecker_factors_commute(a1, a2)
        x1, x2 = rng.randrange(7), rng.randrange(7)
        a = compose(power(a1, x1), power(a2, x2))
        assert check_kronecker_equivalence(a1, a2, a, x1, x2)
        other = compose(a, P("(1 2)", 5))
        assert not check_kronecker_equivalence(a1, a2, other, x1, x2)
