import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from finmember.perm import Permutation

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def perms(draw, degree=None, min_degree=1, max_degree=7):
    m = draw(st.integers(min_degree, max_degree)) if degree is None else degree
    return Permutation(tuple(draw(st.permutations(range(m)))))


@st.composite
def perm_lists(draw, degree, min_size=1, max_size=4):
    n = draw(st.integers(min_size, max_size))
    return [draw(perms(degree)) for _ in range(n)]


@pytest.fixture
def rng():
    return random.Random(20261019)


def P(text, degree):
    from finmember.perm import parse_perm
    return parse_perm(text, degree)
