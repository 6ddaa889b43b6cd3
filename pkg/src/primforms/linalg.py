"""Exact linear algebra over Q on row vectors.

Rows are lists of ``int`` or ``Fraction``.  Elimination runs on integer rows
(fraction-free, with content removal), which keeps entries far smaller than
naive Fraction arithmetic.  Vectors act on matrices from the left: ``v @ M``.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Matrix = list[list]


class SingularMatrixError(ArithmeticError):
    pass


def _content(row) -> int:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


def to_int_row(row) -> list[int]:
    """Scale a rational row to a primitive integer row (same direction)."""
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = lcm(den, x.denominator)
    ints = [int(x * den) if isinstance(x, Fraction) else x * den for x in row]
    g = _content(ints)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def echelon_int(rows, ncols: int | None = None):
    """Fully reduced echelon form of integer rows.

    Returns ``(rows, pivots)``: independent integer rows, each row ``i`` has a
    nonzero entry at ``pivots[i]`` and every other returned row has zero
    there.  Only the first ``ncols`` columns are used to pick pivots; row
    operations still act on whole rows.
    """
    work = [to_int_row(r) for r in rows]
    if not work:
        return [], []
    width = len(work[0])
    ncols = width if ncols is None else min(ncols, width)
    basis: list[list[int]] = []
    pivots: list[int] = []
    for row in work:
        # reduce against existing pivots
        for b, c in zip(basis, pivots):
            x = row[c]
            if x:
                y = b[c]
                g = gcd(x, y)
                mx, my = y // g, x // g
                row = [mx * r - my * s for r, s in zip(row, b)]
        piv = next((c for c in range(ncols) if row[c]), None)
        if piv is None:
            continue
        g = _content(row)
        if g > 1:
            row = [x // g for x in row]
        if row[piv] < 0:
            row = [-x for x in row]
        # clear the new pivot column in older rows
        for i, b in enumerate(basis):
            x = b[piv]
            if x:
                y = row[piv]
                g = gcd(x, y)
                mx, my = y // g, x // g
                nb = [mx * s - my * r for s, r in zip(b, row)]
                g2 = _content(nb)
                if g2 > 1:
                    nb = [v // g2 for v in nb]
                if nb[pivots[i]] < 0:
                    nb = [-v for v in nb]
                basis[i] = nb
        basis.append(row)
        pivots.append(piv)
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [basis[i] for i in order], [pivots[i] for i in order]


def rref(rows, ncols: int | None = None):
    """Reduced row echelon form with Fraction entries (pivot entries equal 1)."""
    ints, pivots = echelon_int(rows, ncols)
    out = []
    for r, c in zip(ints, pivots):
        d = r[c]
        out.append([_frac(x, d) for x in r])
    return out, pivots


def _frac(x: int, d: int):
    if x % d == 0:
        return x // d
    return Fraction(x, d)


def rank(rows) -> int:
    return len(echelon_int(rows)[0])


def transpose(M: Matrix) -> Matrix:
    return [list(col) for col in zip(*M)] if M else []


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col) if a and b) for col in Bt] for row in A]


def vec_mat(v, M: Matrix) -> list:
    n = len(M[0]) if M else 0
    out = [0] * n
    for x, row in zip(v, M):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return [_norm(x) for x in out]


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def mat_add_scalar(M: Matrix, c) -> Matrix:
    """``M + c*I``."""
    out = [list(r) for r in M]
    for i in range(len(out)):
        out[i][i] = _norm(out[i][i] + c)
    return out


def nullspace(M: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of ``{x : M x = 0}`` (column kernel) as rows."""
    if not M:
        return identity(ncols or 0)
    n = len(M[0])
    R, piv = rref(M)
    free = [j for j in range(n) if j not in set(piv)]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, c in zip(R, piv):
            v[c] = _norm(-r[f])
        basis.append(v)
    return basis


def left_kernel(M: Matrix) -> Matrix:
    """Basis of ``{v : v M = 0}`` as rows."""
    if not M:
        return []
    return nullspace(transpose(M))


def solve_left(A: Matrix, b) -> list:
    """Solve ``x A = b`` for square nonsingular ``A``."""
    n = len(A)
    aug = [list(col) + [bi] for col, bi in zip(transpose(A), b)]
    R, piv = rref(aug, ncols=n)
    if len(piv) < n:
        raise SingularMatrixError("matrix is singular")
    return [R[i][n] for i in range(n)]


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(A)]
    R, piv = rref(aug, ncols=n)
    if len(piv) < n:
        raise SingularMatrixError("matrix is singular")
    return [r[n:] for r in R]


def charpoly(M: Matrix) -> list[Fraction]:
    """Characteristic polynomial ``det(X*I - M)``, coefficients low degree first.

    Hessenberg reduction followed by the standard recurrence, O(n^3) over Q.
    """
    n = len(M)
    H = [[Fraction(x) for x in row] for row in M]
    for m in range(1, n - 1):
        # pivot in column m-1 below the subdiagonal
        i = next((r for r in range(m, n) if H[r][m - 1] != 0), None)
        if i is None:
            continue
        if i != m:
            H[i], H[m] = H[m], H[i]
            for row in H:
                row[i], row[m] = row[m], row[i]
        piv = H[m][m - 1]
        for r in range(m + 1, n):
            t = H[r][m - 1]
            if t == 0:
                continue
            u = t / piv
            Hr, Hm = H[r], H[m]
            for c in range(n):
                if Hm[c]:
                    Hr[c] -= u * Hm[c]
            for row in H:
                if row[r]:
                    row[m] += u * row[r]
    # p_j: char poly of the leading j x j block
    polys: list[list[Fraction]] = [[Fraction(1)]]
    for j in range(1, n + 1):
        hjj = H[j - 1][j - 1]
        prev = polys[j - 1]
        cur = [Fraction(0)] + prev  # X * p_{j-1}
        for i, c in enumerate(prev):
            cur[i] -= hjj * c
        prod = Fraction(1)
        for i in range(j - 1, 0, -1):
            prod *= H[i][i - 1]
            if prod == 0:
                break
            h = H[i - 1][j - 1]
            if h:
                coef = h * prod
                for t, c in enumerate(polys[i - 1]):
                    cur[t] -= coef * c
        polys.append(cur)
    return polys[n]


def poly_eval_vec(poly, v, M: Matrix) -> list:
    """``v @ poly(M)`` by Horner, using only vector-matrix products."""
    acc = [0] * len(v)
    for c in reversed(list(poly)):
        acc = vec_mat(acc, M) if any(acc) else acc
        if c:
            acc = [_norm(a + c * x) for a, x in zip(acc, v)]
    return acc


def poly_eval_mat(poly, M: Matrix) -> Matrix:
    n = len(M)
    acc = [[0] * n for _ in range(n)]
    for c in reversed(list(poly)):
        acc = mat_mul(acc, M) if any(any(r) for r in acc) else acc
        if c:
            acc = mat_add_scalar(acc, c)
    return acc


def restrict(basis: Matrix, pivots: list[int], M: Matrix) -> Matrix:
    """Matrix of ``M`` on the stable subspace spanned by rref ``basis`` rows."""
    out = []
    for b in basis:
        img = vec_mat(b, M)
        out.append([img[c] for c in pivots])
    return out


def coordinates(basis: Matrix, pivots: list[int], v) -> list:
    """Coordinates of ``v`` in an rref basis; raises if ``v`` is outside the span."""
    coords = [v[c] for c in pivots]
    recon = [0] * len(v)
    for x, b in zip(coords, basis):
        if x:
            for j, y in enumerate(b):
                if y:
                    recon[j] += x * y
    if any(_norm(a - b) != 0 for a, b in zip(recon, v)):
        raise ValueError("vector is not in the span")
    return coords
