from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from primforms.exactnum import FieldMismatchError, IntPoly, QuadExt, factor_int_poly, squarefree_decompose

small = st.integers(-50, 50)
fracs = st.fractions(min_value=-50, max_value=50, max_denominator=20)
radicands = st.sampled_from([2, 3, 5, 10, 114, 144169])


def quad(r):
    return st.builds(lambda a, b: QuadExt(a, b, r), fracs, fracs)


def test_squarefree_decompose():
    assert squarefree_decompose(1) == (1, 1)
    assert squarefree_decompose(72) == (2, 6)
    assert squarefree_decompose(576 * 144169) == (144169, 24)
    with pytest.raises(ValueError):
        squarefree_decompose(0)


def test_quadext_reduces_radicand():
    x = QuadExt(0, 1, 8)
    assert x == QuadExt(0, 2, 2)
    assert QuadExt(3, 2, 9) == QuadExt(9)
    assert QuadExt.sqrt(360) == QuadExt(0, 6, 10)
    assert QuadExt.sqrt(16).is_rational


def test_quadext_arithmetic_and_printing():
    a = QuadExt(540, 12, 144169)
    assert a.norm() == 540 ** 2 - 144 * 144169
    assert a.trace() == 1080
    assert str(a) == "540 + 12*sqrt(144169)"
    assert str(a.conjugate()) == "540 - 12*sqrt(144169)"
    assert str(QuadExt(Fraction(-1, 2))) == "-1/2"
    assert (a * a.conjugate()) == QuadExt(a.norm())


def test_quadext_field_mismatch():
    with pytest.raises(FieldMismatchError):
        QuadExt(0, 1, 2) + QuadExt(0, 1, 3)


@given(st.data(), radicands)
def test_quadext_field_axioms(data, r):
    x, y, z = (data.draw(quad(r)) for _ in range(3))
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x * y).norm() == x.norm() * y.norm()
    if y:
        assert (x / y) * y == x


def test_intpoly_basics():
    p = IntPoly.from_roots([1, 2])
    assert p == IntPoly([2, -3, 1])
    assert str(p) == "X^2 - 3*X + 2"
    assert p(5) == 12
    assert p.derivative() == IntPoly([-3, 2])
    with pytest.raises(ValueError):
        IntPoly.from_rational([Fraction(1, 2), 1])


@given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=5))
def test_factor_int_poly_linear(roots):
    p = IntPoly.from_roots(roots)
    factors, rest = factor_int_poly(p)
    assert rest is None
    assert sorted(-f[0] for f in factors) == sorted(roots)


@given(st.lists(st.tuples(st.integers(-10 ** 5, 10 ** 5), st.integers(-10 ** 8, 10 ** 8)),
                min_size=1, max_size=2))
def test_factor_int_poly_product_identity(quads):
    p = IntPoly([1])
    for b, c in quads:
        p = p * IntPoly([c, b, 1])
    factors, rest = factor_int_poly(p)
    prod = IntPoly([1])
    for f in factors:
        prod = prod * f
    if rest is not None:
        prod = prod * rest
    assert prod == p
    assert all(f.degree <= 2 for f in factors)


def test_factor_int_poly_irreducible_quartic():
    p = IntPoly([108573696000, 0, -1446840, 0, 1])
    factors, rest = factor_int_poly(p)
    assert factors == [] and rest == p
