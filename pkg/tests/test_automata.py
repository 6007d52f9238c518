import random

import pytest

from finmember.automata import (
    Dfa, is_group_dfa, letter_permutation, monoid_is_group, parse_dfa, parse_group_nfa,
    format_dfa, format_group_nfa, transformation_monoid,
)
from finmember.errors import InputError
from finmember.instances import random_group_nfa
from finmember.perm import Permutation, compose_all, parse_perm


def test_one_state_dfa_is_group():
    d = Dfa(1, ("a",), ((0,),), 0, frozenset({0}))
    assert is_group_dfa(d)


def test_merging_letter_is_not_group():
    d = parse_dfa("states 2\ninitial 1\nfinal 2\ntrans 1 a 2\ntrans 2 a 2\n")
    assert not is_group_dfa(d)
    with pytest.raises(InputError):
        letter_permutation(d, "a")


def test_letter_permutations():
    d = parse_dfa("states 2\ninitial 1\ntrans 1 a 1\ntrans 2 a 2\ntrans 1 b 2\ntrans 2 b 1\n")
    assert letter_permutation(d, "a").is_identity()
    assert letter_permutation(d, "b") == parse_perm("(1 2)", 2)


def random_dfa(rng, n, letters, bijective_bias):
    table = []
    cols = []
    for _ in letters:
        if rng.random() < bijective_bias:
            cols.append(rng.sample(range(n), n))
        else:
            cols.append([rng.randrange(n) for _ in range(n)])
    table = tuple(tuple(cols[i][q] for i in range(len(letters))) for q in range(n))
    return Dfa(n, tuple(letters), table, 0, frozenset({0}))


def test_group_detection_matches_monoid_closure():
    rng = random.Random(2)
    for _ in range(300):
        n = rng.randint(1, 5)
        d = random_dfa(rng, n, ["a", "b"], 0.7)
        assert is_group_dfa(d) == monoid_is_group(transformation_monoid(d))


def test_word_action_equals_product_of_letters():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 5)
        d = random_dfa(rng, n, ["a", "b", "c"], 1.0)
        word = [rng.choice(d.alphabet) for _ in range(rng.randint(0, 8))]
        pi = compose_all((letter_permutation(d, x) for x in word), n)
        for q in range(n):
            assert d.run(word, q) == pi.image[q]


def test_dfa_must_be_total():
    with pytest.raises(InputError):
        parse_dfa("states 2\ninitial 1\ntrans 1 a 2\n")


def test_nfa_round_trip():
    rng = random.Random(4)
    a = random_group_nfa(rng, 4, 3, 5)
    assert parse_group_nfa(format_group_nfa(a)) == a
    d = random_dfa(rng, 3, ["x", "y"], 1.0)
    assert parse_dfa(format_dfa(d)) == d


def test_nfa_degree_check():
    with pytest.raises(InputError):
        parse_group_nfa("degree 3\nstates 1\ninitial 1\nfinal 1\ntrans 1 (1 5) 1\n")
