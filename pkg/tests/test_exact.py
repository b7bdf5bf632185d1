from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegeltheta.exact import (
    det_rational,
    gram_of_sublist,
    identity_matrix,
    mat_mul,
    rat_inverse,
    smith_normal_form,
    solve_rational,
)


def is_unimodular(m):
    return abs(det_rational(m)) == 1


def test_snf_single_entry():
    u, d, v = smith_normal_form([[2]])
    assert d == [[2]]
    assert mat_mul(mat_mul(u, [[2]]), v) == d


def test_snf_swap_matrix():
    u, d, v = smith_normal_form([[0, 1], [1, 0]])
    assert d == [[1, 0], [0, 1]]
    assert mat_mul(mat_mul(u, [[0, 1], [1, 0]]), v) == d
    assert is_unimodular(u) and is_unimodular(v)


def test_snf_already_diagonal():
    m = [[2, 0], [0, 6]]
    u, d, v = smith_normal_form(m)
    assert d == [[2, 0], [0, 6]]


def test_snf_divisibility_chain():
    m = [[4, 0], [0, 6]]
    u, d, v = smith_normal_form(m)
    assert d == [[2, 0], [0, 12]]
    assert mat_mul(mat_mul(u, m), v) == d


def test_snf_a2_gram():
    m = [[2, -1], [-1, 2]]
    u, d, v = smith_normal_form(m)
    assert d == [[1, 0], [0, 3]]
    assert mat_mul(mat_mul(u, m), v) == d


def test_snf_rectangular():
    m = [[2, 4, 6], [4, 8, 10]]
    u, d, v = smith_normal_form(m)
    assert mat_mul(mat_mul(u, m), v) == d
    assert d[0][1] == d[0][2] == d[1][0] == 0
    assert d[0][0] > 0 and d[1][1] % d[0][0] == 0


int_entries = st.integers(min_value=-30, max_value=30)


@st.composite
def int_matrices(draw, max_dim=4):
    rows = draw(st.integers(min_value=1, max_value=max_dim))
    cols = draw(st.integers(min_value=1, max_value=max_dim))
    return [[draw(int_entries) for _ in range(cols)] for _ in range(rows)]


@given(int_matrices())
@settings(max_examples=150, deadline=None)
def test_snf_factorization_property(m):
    u, d, v = smith_normal_form(m)
    assert mat_mul(mat_mul(u, m), v) == d
    assert is_unimodular(u)
    assert is_unimodular(v)
    rows, cols = len(m), len(m[0])
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0
    diag = [d[i][i] for i in range(min(rows, cols))]
    for a, b in zip(diag, diag[1:]):
        assert a >= 0
        if a != 0:
            assert b % a == 0
        else:
            assert b == 0


def test_rat_inverse_identity():
    assert rat_inverse(identity_matrix(3)) == [
        [Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(1), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(1)],
    ]


def test_rat_inverse_examples():
    assert rat_inverse([[2]]) == [[Fraction(1, 2)]]
    assert rat_inverse([[0, 1], [1, 0]]) == [
        [Fraction(0), Fraction(1)],
        [Fraction(1), Fraction(0)],
    ]


def test_rat_inverse_singular_raises():
    with pytest.raises(ValueError):
        rat_inverse([[1, 2], [2, 4]])


@st.composite
def invertible_matrices(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    m = [[draw(int_entries) for _ in range(n)] for _ in range(n)]
    if det_rational(m) == 0:
        for i in range(n):
            m[i][i] += 67
    return m


@given(invertible_matrices())
@settings(max_examples=100, deadline=None)
def test_rat_inverse_property(m):
    n = len(m)
    assert mat_mul(rat_inverse(m), m) == [
        [Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)
    ]


def test_solve_rational():
    sol = solve_rational([[2, 0], [0, 3]], [1, 1])
    assert sol == [Fraction(1, 2), Fraction(1, 3)]


def test_gram_of_sublist_full_basis():
    g = [[0, 1], [1, 0]]
    basis = [[1, 0], [0, 1]]
    assert gram_of_sublist(g, basis) == [[Fraction(0), Fraction(1)],
                                         [Fraction(1), Fraction(0)]]


def test_gram_of_sublist_single_vector():
    assert gram_of_sublist([[2]], [[1]]) == [[Fraction(2)]]


def test_gram_of_sublist_isotropic_direction():
    g = [[1, 0], [0, -1]]
    assert gram_of_sublist(g, [[1, 1]]) == [[Fraction(0)]]


def test_gram_of_sublist_rational_vectors():
    g = [[2]]
    assert gram_of_sublist(g, [[Fraction(1, 2)]]) == [[Fraction(1, 2)]]


def test_det_rational():
    assert det_rational([[2, 1], [1, 2]]) == 3
    assert det_rational([[1, 2], [2, 4]]) == 0
