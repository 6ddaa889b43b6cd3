from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from primforms import linalg

entries = st.integers(-20, 20)


def matrices(n):
    return st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)


@given(st.integers(1, 5).flatmap(matrices))
@settings(max_examples=60)
def test_charpoly_matches_independent_determinant(M):
    X = sympy.Symbol("X")
    want = sympy.Poly(sympy.Matrix(M).charpoly(X).as_expr(), X).all_coeffs()[::-1]
    assert [Fraction(c) for c in linalg.charpoly(M)] == [Fraction(int(c)) for c in want]


@given(st.integers(1, 4).flatmap(matrices))
@settings(max_examples=60)
def test_inverse_or_singular(M):
    r = linalg.rank(M)
    assert r == sympy.Matrix(M).rank()
    if r < len(M):
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inverse(M)
    else:
        assert linalg.mat_mul(M, linalg.inverse(M)) == linalg.identity(len(M))


def test_nullspace_and_solve():
    M = [[1, 2, 3], [2, 4, 6]]
    for v in linalg.nullspace(M):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)
    assert len(linalg.nullspace(M)) == 2
    A = [[2, 1], [1, 3]]
    x = linalg.solve_left(A, [5, 10])
    assert linalg.vec_mat(x, A) == [5, 10]


def test_to_int_row():
    assert linalg.to_int_row([Fraction(1, 2), Fraction(-3, 4), 0]) == [2, -3, 0]
