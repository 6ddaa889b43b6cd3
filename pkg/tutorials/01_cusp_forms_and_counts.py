"""Cusp forms as multiples of Delta_N, and counting primitive forms.

Every cusp form of level N in {1, 2, 3, 4, 6, 8, 9} is Delta_N times a
holomorphic form, so a basis of S_k(N) is Delta_N times monomials in two
generators.  Run with ``python tutorials/01_cusp_forms_and_counts.py``.
"""
from primforms.hecke import cell, classes, computed_count, predicted_count, table_classes
from primforms.ringspace import basis_Sk, dim_Sk, sturm_precision
from primforms.specialseries import DELTA_WEIGHT, LEVELS, delta_series

# Delta_N is the unique normalized cusp form of lowest weight
for N in LEVELS:
    w = DELTA_WEIGHT[N]
    print(f"Delta_{N} (weight {w}):", delta_series(N, 8).coeffs[1:])

# a basis of S_24(6) and the Sturm precision that pins down its elements
N, k = 6, 24
S = basis_Sk(N, k, sturm_precision(N, k))
print(f"\ndim S_{k}({N}) = {S.dim} = dim M_{k - DELTA_WEIGHT[N]}({N}); Sturm precision {S.sturm}")

# the new subspace splits into sign classes by a_p = +-p^kappa at p | N
c = cell(N, k)
print(f"new part: {c.new_dim()} of {c.d}; old part: {c.old_dimension()}")
for i in classes(N):
    print(f"  class {i}: {c.class_dim(i)} newform(s)")

# closed-form tables against exact linear algebra
print("\nN  k   i  predicted computed")
for N in (2, 8, 9):
    for k in (16, 18):
        for i in table_classes(N):
            print(f"{N}  {k}  {i}  {predicted_count(N, k, i):>9} {computed_count(N, k, i):>8}")
print("\ndim S_40(9) =", dim_Sk(9, 40))
