"""Pairs of conjugate newforms and what their sum already knows.

Two newforms f, g conjugate over Q(sqrt(D)) are determined by the rational
sum sigma = (f + g)/2 together with a_p(phi)^2 for phi = (f - g)/2.  Run with
``python tutorials/02_quadratic_pairs.py``.
"""
from fractions import Fraction

from primforms.exactnum import factor_int_poly
from primforms.hecke import cell, eigen_decompose, newton_charpoly, pair_split, trace_series

f, g = eigen_decompose(1, 24)
print("weight 24, level 1:")
for h in (f, g):
    print("  a_2 =", h.a(2), "  a_3 =", h.a(3))

# only the trace: sigma has rational coefficients
t = trace_series(1, 24, 1, 12)
sigma = {n: Fraction(t.coeffs[n], 2) for n in range(1, 12)}
rel = pair_split(sigma, 2, 24, 1)
print("a_2(phi)^2 from the trace alone:", rel.ap_phi_sq, "= 144 *", rel.ap_phi_sq / 144)

# four forms at once: power sums of a_3 from the trace give the characteristic polynomial
t = trace_series(8, 18, 1, 90)
sig = [t.coeffs[3 ** j] for j in range(1, 5)]
poly = newton_charpoly(sig, 4, 3, 18)
print("\nlevel 8, weight 18, prod (X - a_3):", poly)
factors, rest = factor_int_poly(poly)
print("factors:", ", ".join(str(q) for q in factors))
assert poly == cell(8, 18).block_charpoly(1, 3)
