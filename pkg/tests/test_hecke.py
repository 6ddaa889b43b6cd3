import pytest
from hypothesis import given, settings, strategies as st

from primforms.exactnum import IntPoly, QuadExt
from primforms.hecke import (ClassificationError, Eigenform, cell, classes, classify_sign, cm_and_twist_classify,
                             eigen_decompose, good_primes, hecke_matrix, newform_split, newton_charpoly,
                             pair_split, predicted_count, trace_series, twist)
from primforms.ringspace import basis_Sk, sturm_precision
from primforms.specialseries import RHO3, delta_series

TAU = [0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612]


def test_level_one_weight_twelve_is_delta():
    f, = eigen_decompose(1, 12)
    assert f.field == "rational"
    assert [f.a(n) for n in range(1, 12)] == TAU[1:]
    S = basis_Sk(1, 12, 2 * sturm_precision(1, 12))
    assert hecke_matrix(S, 2) == [[-24]]
    assert eigen_decompose(S) == [f]


def test_weight_24_pair():
    forms = eigen_decompose(1, 24)
    assert [f.radicand for f in forms] == [144169, 144169]
    assert {forms[0].a(2), forms[1].a(2)} == {QuadExt(540, 12, 144169), QuadExt(540, -12, 144169)}
    assert forms[1].coeffs == forms[0].conjugate().coeffs
    assert cell(1, 24).block_charpoly(1, 2) == IntPoly([540 ** 2 - 144 * 144169, -1080, 1])


def test_trace_series_is_sum_of_conjugates():
    t = trace_series(1, 24, 1, 12)
    f = eigen_decompose(1, 24)[0]
    assert t.coeffs[:3] == [0, 2, 1080]
    assert all(t.coeffs[n] == f.a(n).trace() for n in range(1, 12))


def test_lowest_weight_level_two_sign_class():
    f, = eigen_decompose(2, 8)
    assert f.sign_class == 2 and f.a(2) == -8
    assert classify_sign(f) == 2
    assert f.series().truncate(20) == delta_series(2, 20)


def test_classify_sign_rejects_bad_boundary_coefficient():
    f, = eigen_decompose(2, 8)
    bad = Eigenform(2, 8, "rational", [QuadExt(0), QuadExt(1), QuadExt(5)], 1)
    with pytest.raises(ClassificationError):
        classify_sign(bad)
    assert classify_sign(f) == 2


def test_newform_split_accounts_for_dimension():
    new, old = newform_split(6, 12)
    c = cell(6, 12)
    size = sum(f.degree if f.field == "charpoly" else 1 for f in new)
    assert size == c.new_dim()
    assert size + c.old_dimension() == c.d
    assert {o.source_level for o in old} <= {1, 2, 3}


def test_split_primes_do_not_change_the_forms():
    key = lambda f: tuple(str(c) for c in f.coeffs[:12])  # noqa: E731
    default = sorted(key(f) for f in eigen_decompose(6, 24) if f.coeffs)
    c = cell(6, 24)
    try:
        other = sorted(key(f) for f in eigen_decompose(6, 24, primes=(11, 13)) if f.coeffs)
    finally:
        c.set_split_primes(good_primes(6)[:6])
    assert other == default


def test_charpoly_only_records():
    c = cell(9, 20)
    f, = c.eigenforms("*")
    assert f.field == "charpoly" and f.degree == 4
    assert c.form_charpoly(f, 2) == IntPoly([108573696000, 0, -1446840, 0, 1])
    with pytest.raises(ValueError):
        c.form_charpoly(f, 3)


def test_classes_and_predicted_counts():
    assert classes(1) == [1]
    assert classes(6) == [1, 2, 3, 6]
    assert classes(9) == ["0", "*", "tw"]
    assert predicted_count(1, 24) == 2
    assert predicted_count(8, 18) == 4
    with pytest.raises(ValueError):
        predicted_count(5, 12)
    with pytest.raises(ValueError):
        predicted_count(1, 13)


def hecke_powers(a, p, k, r):
    """a_{p^j} for j = 0..r from a_p via the Hecke recursion."""
    out = [1, a]
    for _ in range(r - 1):
        out.append(a * out[-1] - p ** (k - 1) * out[-2])
    return out


@given(st.integers(2, 5), st.sampled_from([2, 3, 5, 7]), st.sampled_from([12, 16, 24]), st.data())
@settings(max_examples=80)
def test_newton_charpoly_against_roots(r, p, k, data):
    bound = 2 * p ** ((k - 1) // 2)
    roots = data.draw(st.lists(st.integers(-bound, bound), min_size=r, max_size=r))
    sig = [sum(hecke_powers(a, p, k, r)[j] for a in roots) for j in range(1, r + 1)]
    assert newton_charpoly(sig, r, p, k) == IntPoly.from_roots(roots)


def test_pair_split_level_one():
    f = eigen_decompose(1, 24)[0]
    sigma = {n: f.a(n).rat for n in range(1, 12)}  # (f + conj f) / 2
    rel = pair_split(sigma, 2, 24, 1)
    assert rel.ap_phi_sq == 144 * 144169
    phi = {n: f.a(n).irr for n in range(1, 12)}
    assert rel.product_coprime(2, 3) == phi[2] * phi[3] * 144169
    with pytest.raises(ValueError):
        pair_split(sigma, 2, 24, 2)


def test_level_nine_classes():
    P = 40
    for k in (8, 12, 16):
        c = cell(9, k)
        for f in c.eigenforms("0"):
            g = c.extend(f, P)
            assert all(g.a(p) == 0 for p in (2, 5, 11, 17, 23, 29))  # CM by Q(sqrt(-3))
        for f in c.eigenforms("*"):
            g = c.extend(f, P)
            # not CM, but the rho3-twist is the Galois conjugate
            assert g.a(2) != 0
            assert twist(g, RHO3).truncate(P) == g.conjugate().series().truncate(P)
        for f in c.eigenforms("tw"):
            assert cm_and_twist_classify(c.extend(f, P)) == "P1"


def test_twist_of_delta_is_level_nine():
    P = sturm_precision(9, 12)
    d = cell(1, 12).extend(eigen_decompose(1, 12)[0], P)
    t = twist(d, RHO3).truncate(P)
    assert any(f.coeffs and cell(9, 12).extend(f, P).series().truncate(P) == t
               for f in cell(9, 12).eigenforms("tw"))
