from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from primforms.exactnum import QuadExt
from primforms.qseries import (InexactDivisionError, PrecisionError, QSeries, divide_exact, series_linear,
                               series_mul, series_pow, series_substitute)

ints = st.lists(st.integers(-10 ** 12, 10 ** 12), min_size=1, max_size=60)


def naive_mul(a, b):
    n = min(len(a), len(b))
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(n)]


@given(ints, ints)
def test_mul_matches_naive_convolution(a, b):
    # long integer inputs go through the packed big-integer product
    assert series_mul(QSeries(a), QSeries(b)).coeffs == naive_mul(a, b)


def test_mul_long_mixed_signs():
    a = [(-1) ** i * (i ** 7 + 3) for i in range(300)]
    b = [(-3) ** (i % 5) * i for i in range(250)]
    assert series_mul(QSeries(a), QSeries(b)).coeffs == naive_mul(a, b)


def test_precision_is_the_minimum():
    f = QSeries([1, 2, 3, 4])
    g = QSeries([1, 1])
    assert (f * g).prec == 2
    assert (f + g).prec == 2
    with pytest.raises(PrecisionError):
        f[4]


def test_pow_substitute_and_fractions():
    f = QSeries([1, 1], prec=6)
    assert series_pow(f, 3).coeffs == [1, 3, 3, 1, 0, 0]
    assert series_substitute(QSeries([1, 2, 3]), 2).coeffs == [1, 0, 2]
    h = QSeries([Fraction(1, 2), 1]) * QSeries([2, 0])
    assert h.coeffs == [1, 2]


def test_quadext_coefficients():
    r = QuadExt.sqrt(10)
    f = QSeries([1, r, 0, 0])
    g = f * f
    assert g.coeffs[:3] == [1, 2 * r, 10]


@given(st.lists(st.integers(-100, 100), min_size=2, max_size=30),
       st.lists(st.integers(-100, 100), min_size=2, max_size=30))
def test_divide_exact_inverts_mul(a, b):
    b[0] = b[0] or 1
    f, g = QSeries(a), QSeries(b)
    assert divide_exact(f * g, g) == f.truncate(min(len(a), len(b)))


def test_divide_exact_with_valuation():
    g = QSeries([0, 1, 1, 0, 0])
    f = series_mul(QSeries([2, 3, 0, 0, 0]), g)
    assert divide_exact(f, g).coeffs == [2, 3, 0, 0]
    with pytest.raises(InexactDivisionError):
        divide_exact(QSeries([1, 0, 0]), g)
    with pytest.raises(ZeroDivisionError):
        divide_exact(f, QSeries.zero(5))


def test_series_linear():
    s = series_linear([(2, QSeries([1, 1, 1])), (-1, QSeries([0, 1, 2, 3]))])
    assert s.coeffs == [2, 1, 0]
