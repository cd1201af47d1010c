import logging

import pytest
from hypothesis import strategies as st
from sympy import primerange

from trinomial_oracle import SeqParams

SMALL_PRIMES = list(primerange(2, 60))
ODD_PRIMES = [p for p in SMALL_PRIMES if p > 2]

# a = b = 1: T has a zero below p at 3 and 7, regular at 5, 11, 13
REGULAR_PRIMES = (5, 11, 13)

primes = st.sampled_from(SMALL_PRIMES)


@st.composite
def prime_and_params(draw, prime_pool=ODD_PRIMES):
    p = draw(st.sampled_from(prime_pool))
    a = draw(st.integers(min_value=0, max_value=p - 1))
    b = draw(st.integers(min_value=0, max_value=p - 1))
    return p, SeqParams(a, b)


@st.composite
def digit_lists(draw, p, max_len=8):
    return draw(st.lists(st.integers(min_value=0, max_value=p - 1), min_size=1, max_size=max_len))


@pytest.fixture
def motzkin():
    return SeqParams(1, 1)


@pytest.fixture
def restore_logging():
    """The CLI reconfigures the root logger; put pytest's handlers back afterwards."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
