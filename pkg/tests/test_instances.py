import random

import pytest

from finmember.errors import InputError
from finmember.instances import (
    PROBLEMS, generate, parse_ghg, parse_group, random_knapsack, random_x3hs,
)
from finmember.knapsack import parse_knapsack, solve_knapsack, solve_subset_sum
from finmember.reductions import parse_x3hs, solve_x3hs


@pytest.mark.parametrize("problem", PROBLEMS)
def test_same_seed_same_bytes(problem):
    degree = 5 if problem != "x3hs" else 6
    assert generate(problem, degree, 4, 7) == generate(problem, degree, 4, 7)


def test_seeded_knapsack_is_stable():
    assert generate("knapsack", 5, 4, 7).splitlines()[0] == "degree 5"


def test_planted_subset_sum_is_solvable():
    for seed in range(30):
        inst = parse_knapsack(generate("subsetsum", 6, 8, seed, planted=True), "binary")
        assert solve_subset_sum(inst) is not None


def test_planted_x3hs_is_solvable():
    rng = random.Random(1)
    for _ in range(50):
        assert solve_x3hs(random_x3hs(rng, rng.randint(3, 7), rng.randint(1, 6), planted=True)) is not None
    assert solve_x3hs(parse_x3hs(generate("x3hs", 6, 5, 3, planted=True))) is not None


def test_group_file():
    gf = parse_group("degree 3\ngen (1 2)\n(1 2 3)  # comment\n")
    assert gf.degree == 3 and len(gf.generators) == 2
    with pytest.raises(InputError):
        parse_group("(1 2)\n")


def test_ghg_file():
    inst = parse_ghg("degree 3\ntarget (1 2)\ng (1 2)\nh (2 3)\n")
    assert len(inst.gen_g) == len(inst.gen_h) == 1
    with pytest.raises(InputError):
        parse_ghg("degree 3\nx (1 2)\n")


def test_unknown_problem():
    with pytest.raises(InputError):
        generate("sudoku", 3, 3, 0)
