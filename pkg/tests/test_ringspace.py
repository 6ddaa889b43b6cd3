import pytest

from primforms.qseries import PrecisionError, QSeries, series_mul
from primforms.ringspace import (NotInSpaceError, basis_Mk, basis_Sk, dim_Mk, dim_Sk, monomials,
                                 solve_in_basis, sturm_precision)
from primforms.specialseries import LEVELS, eisenstein

# dim M_k(Gamma0(N)) for even k >= 2 from the genus-0 dimension formula (cusps, elliptic points)
CUSPS = {1: 1, 2: 2, 3: 2, 4: 3, 6: 4, 8: 4, 9: 4}


def dim_M_formula(N, k):
    if N == 1:
        return k // 12 + (0 if k % 12 == 2 else 1)
    if N == 2:
        return k // 4 + 1
    if N == 3:
        return k // 3 + 1
    # genus 0, no elliptic points: (k - 1)(g - 1) + (k/2) * cusps
    return 1 - k + (k // 2) * CUSPS[N]


@pytest.mark.parametrize("N", LEVELS)
def test_dimensions_match_formula(N):
    for k in range(4, 41, 2):
        assert dim_Mk(N, k) == dim_M_formula(N, k), (N, k)
        assert dim_Sk(N, k) == dim_M_formula(N, k) - CUSPS[N], (N, k)


def test_sturm_precision():
    assert sturm_precision(1, 12) == 1 + 10
    assert sturm_precision(9, 20) == 20 + 10


def test_monomials_descending():
    assert monomials(1, 24) == [(6, 0), (3, 2), (0, 4)]
    assert monomials(3, 5) == []  # odd weight at an even-only level


@pytest.mark.parametrize("N", LEVELS)
def test_cusp_basis_vanishes_at_infinity(N):
    for k in (8, 16, 24):
        S = basis_Sk(N, k, sturm_precision(N, k))
        assert S.dim == dim_Sk(N, k)
        assert all(b.coeffs[0] == 0 for b in S.basis)


def test_eisenstein_relations_in_level_one():
    P = 300
    e4, e6 = eisenstein(4, P), eisenstein(6, P)
    assert eisenstein(8, P) == series_mul(e4, e4)
    assert eisenstein(10, P) == series_mul(e4, e6)
    assert eisenstein(14, P) == series_mul(series_mul(e4, e4), e6)


def test_solve_in_basis():
    M = basis_Mk(1, 12, 20)
    e12 = eisenstein(12, 20)
    coords = solve_in_basis(e12, M)
    assert M.combination(coords) == e12
    with pytest.raises(NotInSpaceError):
        solve_in_basis(eisenstein(12, 20), basis_Sk(1, 12, 20))
    with pytest.raises(PrecisionError):
        solve_in_basis(QSeries([0, 1]), basis_Sk(1, 24, 20))
