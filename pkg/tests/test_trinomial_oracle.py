import pytest

from errors import BudgetExceededError
from sequence_tables import exact_m_sequence, exact_t_sequence
from trinomial_oracle import (
    MOTZKIN_WEIGHT,
    ONE,
    ONE_PLUS_X_WEIGHT,
    RIORDAN_WEIGHT,
    X_WEIGHT,
    LaurentPoly,
    SeqParams,
    oracle_ct,
    oracle_prefix,
    oracle_prefix_mod,
    oracle_seq_mod,
    poly_mul,
)

# every (a, b) with |a|, |b| <= 3, degenerate pairs included
SMALL_GRID = [SeqParams(a, b) for a in range(-3, 4) for b in range(-3, 4)]
X_INVERSE = LaurentPoly(((-1, 1),))


def test_poly_mul_identity():
    P = SeqParams(1, 1).trinomial()
    assert poly_mul(P, ONE) == P


def test_poly_mul_square():
    P = SeqParams(1, 1).trinomial()
    assert (P * P).coefficients == {-2: 1, -1: 2, 0: 3, 1: 2, 2: 1}


def test_poly_mul_cancels():
    assert RIORDAN_WEIGHT * ONE_PLUS_X_WEIGHT == MOTZKIN_WEIGHT


def test_laurent_poly_drops_zero_terms():
    f = LaurentPoly(((1, 2), (1, -2), (0, 5)))
    assert f.terms == ((0, 5),)
    assert f.ct() == 5
    assert LaurentPoly(()).degree == 0


def test_central_trinomial_coefficients():
    assert oracle_prefix(SeqParams(1, 1), 5) == [1, 1, 3, 7, 19]


@pytest.mark.parametrize("weight, expected", [
    (MOTZKIN_WEIGHT, [1, 1, 2, 4, 9, 21, 51, 127]),
    (RIORDAN_WEIGHT, [1, 0, 1, 1, 3, 6, 15, 36]),
    (X_WEIGHT, [0, 1, 2, 6, 16, 45, 126, 357]),
    (ONE_PLUS_X_WEIGHT, [1, 2, 5, 13, 35, 96, 267, 750]),
])
def test_weighted_sequences(weight, expected):
    assert oracle_prefix(SeqParams(1, 1), len(expected), weight) == expected


def test_oracle_ct_examples():
    assert oracle_ct(SeqParams(1, 1), 0, RIORDAN_WEIGHT) == 1
    assert oracle_ct(SeqParams(2, 1), 2) == 9
    assert oracle_ct(SeqParams(1, 1), 9, MOTZKIN_WEIGHT) == 835
    assert oracle_ct(SeqParams(1, 1), 13, MOTZKIN_WEIGHT) == 41835


def test_oracle_is_exact_past_64_bits():
    t50 = oracle_ct(SeqParams(1, 1), 50)
    assert t50 > 2**64
    assert t50 == exact_t_sequence(SeqParams(1, 1), 51)[50]


def test_riordan_factor_two_relation():
    T = oracle_prefix(SeqParams(1, 1), 31)
    R = oracle_prefix(SeqParams(1, 1), 30, RIORDAN_WEIGHT)
    assert all(2 * R[n] == 3 * T[n] - T[n + 1] for n in range(30))


@pytest.mark.parametrize("n, weight, p, expected", [
    (4, ONE, 5, 4),
    (13, MOTZKIN_WEIGHT, 5, 0),
    (9, MOTZKIN_WEIGHT, 5, 0),
    (7, MOTZKIN_WEIGHT, 5, 2),
])
def test_oracle_seq_mod(n, weight, p, expected):
    assert oracle_seq_mod(SeqParams(1, 1), n, weight, p) == expected


@pytest.mark.parametrize("params", [SeqParams(1, 1), SeqParams(2, 3), SeqParams(0, 4), SeqParams(5, 0)])
@pytest.mark.parametrize("p", [2, 7, 31])
def test_reduced_expansion_matches_exact(params, p):
    for weight in (ONE, MOTZKIN_WEIGHT, RIORDAN_WEIGHT):
        exact = oracle_prefix(params, 60, weight)
        assert oracle_prefix_mod(params, 60, weight, p) == [v % p for v in exact]


def test_cap():
    with pytest.raises(BudgetExceededError) as exc:
        oracle_ct(SeqParams(1, 1), 2001)
    assert exc.value.required == 2001
    assert exc.value.budget == 2000
    assert len(oracle_prefix_mod(SeqParams(1, 1), 2100, ONE, 5, cap=None)) == 2100


@pytest.mark.parametrize("params", SMALL_GRID, ids=str)
def test_motzkin_from_three_trinomials(params):
    a, b = params.a, params.b
    T = oracle_prefix(params, 43)
    M = oracle_prefix(params, 41, MOTZKIN_WEIGHT)
    for n in range(41):
        assert 2 * a * a * M[n] == (4 * a * a - b * b) * T[n] + 2 * b * T[n + 1] - T[n + 2], n


@pytest.mark.parametrize("params", SMALL_GRID, ids=str)
def test_recurrences_match_oracle(params):
    assert exact_t_sequence(params, 41) == oracle_prefix(params, 41)
    assert exact_m_sequence(params, 41) == oracle_prefix(params, 41, MOTZKIN_WEIGHT)


@pytest.mark.parametrize("params", SMALL_GRID, ids=str)
def test_constant_term_is_symmetric_in_x(params):
    assert oracle_prefix(params, 41, X_WEIGHT) == oracle_prefix(params, 41, X_INVERSE)


@pytest.mark.parametrize("params", SMALL_GRID, ids=str)
def test_x_weights_shift_trinomials(params):
    # T_{n+1} = b T_n + 2a ct(P^n x), from P^{n+1} = P^n P and the x <-> 1/x symmetry
    a, b = params.a, params.b
    T = oracle_prefix(params, 42)
    X = oracle_prefix(params, 41, X_WEIGHT)
    Y = oracle_prefix(params, 41, ONE_PLUS_X_WEIGHT)
    for n in range(41):
        assert 2 * a * X[n] == T[n + 1] - b * T[n], n
        assert 2 * a * Y[n] == T[n + 1] + (2 * a - b) * T[n], n


def test_x_weights_for_central_trinomials():
    T = oracle_prefix(SeqParams(1, 1), 42)
    X = oracle_prefix(SeqParams(1, 1), 41, X_WEIGHT)
    Y = oracle_prefix(SeqParams(1, 1), 41, ONE_PLUS_X_WEIGHT)
    assert all(2 * X[n] == T[n + 1] - T[n] for n in range(41))
    assert all(2 * Y[n] == T[n] + T[n + 1] for n in range(41))
