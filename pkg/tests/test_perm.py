import pytest
from hypothesis import given, strategies as st

from conftest import P, perms
from finmember.errors import InputError
from finmember.perm import (
    Permutation, compose, direct_sum, format_perm, inverse, order, parse_perm, power,
)


def test_compose_left_to_right():
    # i^(ab) = (i^a)^b: 1 -> 2 -> 1, 2 -> 3 -> 3, 3 -> 1 -> 2
    assert compose(P("(1 2 3)", 3), P("(1 2)", 3)) == P("(2 3)", 3)


def test_compose_identity():
    b = P("(1 4)(2 3)", 4)
    assert compose(Permutation.identity(4), b) == b


def test_bracket_cycles_three_then_five():
    assert compose(Permutation.cycle(3, 5), Permutation.cycle(5)) == P("(1 3 2 4 5)", 5)


def test_compose_degree_mismatch():
    with pytest.raises(InputError):
        compose(Permutation.identity(3), Permutation.identity(4))


def test_inverse_of_three_cycle():
    assert inverse(P("(1 2 3)", 3)) == P("(1 3 2)", 3)
    assert inverse(Permutation.identity(5)) == Permutation.identity(5)


def test_power_examples():
    c5 = Permutation.cycle(5)
    assert power(c5, 0).is_identity()
    assert power(c5, 5).is_identity()
    assert power(c5, 7) == compose(c5, c5)
    assert power(c5, -1) == inverse(c5)


def test_order_examples():
    assert order(Permutation.identity(4)) == 1
    assert order(P("(1 2)(3 4 5)", 5)) == 6
    for p in range(1, 14):
        assert order(Permutation.cycle(p)) == p


def test_order_is_exact_integer_at_large_degree():
    # cycles of the first primes up to 97 on disjoint blocks: lcm is the primorial
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
    a = direct_sum(*(Permutation.cycle(p) for p in primes))
    expected = 1
    for p in primes:
        expected *= p
    assert order(a) == expected
    assert expected > 2 ** 64
    assert power(a, expected + 5) == power(a, 5)


def test_parse_and_format():
    a = parse_perm("(1, 3)(2 4 5)", 6)
    assert a(1) == 3 and a(5) == 2 and a(6) == 6
    assert format_perm(a) == "(1 3)(2 4 5)"
    assert format_perm(Permutation.identity(3)) == "()"
    assert parse_perm("()", 3).is_identity()


@pytest.mark.parametrize("bad", ["", "(1 2", "(1 1)", "(1 9)", "1 2", "(a b)", "(1 2)x"])
def test_parse_rejects(bad):
    with pytest.raises(InputError):
        parse_perm(bad, 4)


def test_rejects_non_bijection():
    with pytest.raises(InputError):
        Permutation((0, 0, 1))


@given(st.integers(1, 7).flatmap(lambda m: st.tuples(perms(m), perms(m), perms(m))))
def test_associative(abc):
    a, b, c = abc
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(perms(max_degree=8))
def test_inverse_cancels(a):
    assert compose(a, inverse(a)).is_identity()
    assert compose(inverse(a), a).is_identity()


@given(perms(max_degree=8), st.integers(0, 500))
def test_power_reduces_mod_order(a, e):
    assert power(a, e) == power(a, e % order(a))
    naive = Permutation.identity(a.degree)
    for _ in range(e % 40):
        naive = compose(naive, a)
    assert power(a, e % 40) == naive


@given(perms(max_degree=8))
def test_round_trip_cycle_notation(a):
    assert parse_perm(format_perm(a), a.degree) == a


@given(perms(max_degree=6), perms(max_degree=6))
def test_direct_sum_is_homomorphic(a, b):
    assert compose(direct_sum(a, b), direct_sum(a, b)) == direct_sum(compose(a, a), compose(b, b))
