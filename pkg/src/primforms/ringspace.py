"""Graded rings of modular forms for the levels 1, 2, 3, 4, 6, 8, 9.

Each ring is a polynomial ring in two generators (restricted to even total
weight where the generators have odd weight); the cusp forms are the
principal ideal generated by ``Delta_N``.  Spaces carry exact q-expansion
bases plus an echelon form used for solving.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
import threading

from . import linalg
from .qseries import PrecisionError, QSeries, series_mul
from .specialseries import (DELTA_WEIGHT, LEVELS, RHO3, RHO4, alpha_series, character_series,
                            delta_series, eisenstein, level_series)

INDEX = {1: 1, 2: 3, 3: 4, 4: 6, 6: 12, 8: 12, 9: 12}
STURM_MARGIN = 10


class InternalConsistencyError(RuntimeError):
    """A computed object contradicts a structural fact it must satisfy."""


class NotInSpaceError(ValueError):
    def __init__(self, index: int):
        super().__init__(f"series is not in the space: mismatch at q^{index}")
        self.index = index


@dataclass(frozen=True)
class Generator:
    name: str
    weight: int
    build: object  # callable prec -> QSeries


@dataclass(frozen=True)
class GeneratorSet:
    level: int
    generators: tuple[Generator, Generator]
    even_only: bool

    @property
    def weights(self) -> tuple[int, int]:
        return self.generators[0].weight, self.generators[1].weight


def _gen(name, weight, build):
    return Generator(name, weight, build)


GENERATORS = {
    1: GeneratorSet(1, (_gen("E4", 4, lambda n: eisenstein(4, n)),
                        _gen("E6", 6, lambda n: eisenstein(6, n))), False),
    2: GeneratorSet(2, (_gen("C2", 2, lambda n: level_series(2, n)),
                        _gen("alpha2", 4, lambda n: alpha_series(2, n))), False),
    3: GeneratorSet(3, (_gen("F3", 1, lambda n: character_series(RHO3, n)),
                        _gen("alpha3", 3, lambda n: alpha_series(3, n))), True),
    4: GeneratorSet(4, (_gen("F4", 1, lambda n: character_series(RHO4, n)),
                        _gen("alpha4", 2, lambda n: alpha_series(4, n))), True),
    6: GeneratorSet(6, (_gen("F3", 1, lambda n: character_series(RHO3, n)),
                        _gen("alpha6", 1, lambda n: alpha_series(6, n))), True),
    8: GeneratorSet(8, (_gen("F4", 1, lambda n: character_series(RHO4, n)),
                        _gen("alpha8", 1, lambda n: alpha_series(8, n))), True),
    9: GeneratorSet(9, (_gen("F3", 1, lambda n: character_series(RHO3, n)),
                        _gen("alpha9", 1, lambda n: alpha_series(9, n))), True),
}


def _check_level(N: int) -> None:
    if N not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {N!r}")


def sturm_precision(N: int, k: int) -> int:
    """Number of leading coefficients that determine a form of weight ``k``, plus a margin."""
    _check_level(N)
    return ceil(k * INDEX[N] / 12) + STURM_MARGIN


def monomials(N: int, k: int) -> list[tuple[int, int]]:
    """Exponent pairs ``(a, b)`` with ``a*w1 + b*w2 == k``, ``a`` descending."""
    _check_level(N)
    gs = GENERATORS[N]
    w1, w2 = gs.weights
    if k < 0 or (gs.even_only and k % 2):
        return []
    out = []
    for b in range(k // w2 + 1):
        rest = k - b * w2
        if rest % w1 == 0:
            out.append((rest // w1, b))
    out.sort(key=lambda ab: -ab[0])
    return out


def dim_Mk(N: int, k: int) -> int:
    return len(monomials(N, k))


def dim_Sk(N: int, k: int) -> int:
    w = DELTA_WEIGHT[N]
    return dim_Mk(N, k - w) if k >= w else 0


_power_lock = threading.Lock()
_power_cache: dict[tuple[int, int, int], list[QSeries]] = {}


def _generator_powers(N: int, which: int, top: int, prec: int) -> list[QSeries]:
    """Powers ``g^0 .. g^top`` of one generator; shared across weights."""
    key = (N, which, prec)
    with _power_lock:
        pows = _power_cache.get(key)
        if pows is None:
            if len(_power_cache) > 64:
                _power_cache.clear()
            g = GENERATORS[N].generators[which].build(prec)
            pows = [QSeries.constant(1, prec), g]
            _power_cache[key] = pows
        while len(pows) <= top:
            pows.append(series_mul(pows[-1], pows[1]))
        return pows[:top + 1]


def monomial_series(N: int, k: int, prec: int) -> list[QSeries]:
    exps = monomials(N, k)
    if not exps:
        return []
    amax = max(a for a, _ in exps)
    bmax = max(b for _, b in exps)
    P1 = _generator_powers(N, 0, amax, prec)
    P2 = _generator_powers(N, 1, bmax, prec)
    return [series_mul(P1[a], P2[b]) if a and b else (P1[a] if b == 0 else P2[b])
            for a, b in exps]


@dataclass
class Echelon:
    """Integer echelon rows of a basis at one precision.

    ``rows[i]`` has a nonzero entry at ``pivots[i]`` and the other rows vanish
    there.  ``transform[i]`` expresses ``rows[i]`` in the original basis.
    """

    prec: int
    rows: list[list[int]]
    pivots: list[int]
    transform: list[list[int]]

    def normalized(self, i: int) -> list:
        r = self.rows[i]
        d = r[self.pivots[i]]
        return [linalg._frac(x, d) for x in r]


@dataclass
class FormSpace:
    """A weight-``k`` level-``N`` space with an exact q-expansion basis."""

    level: int
    weight: int
    kind: str  # "M" or "S"
    basis: list[QSeries]
    exponents: list[tuple[int, int]]
    _echelons: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def prec(self) -> int:
        return min((b.prec for b in self.basis), default=0)

    @property
    def sturm(self) -> int:
        return sturm_precision(self.level, self.weight)

    def with_prec(self, prec: int) -> "FormSpace":
        if prec <= self.prec:
            if prec == self.prec:
                return self
            return FormSpace(self.level, self.weight, self.kind,
                             [b.truncate(prec) for b in self.basis], self.exponents)
        builder = basis_Sk if self.kind == "S" else basis_Mk
        return builder(self.level, self.weight, prec)

    def echelon(self) -> Echelon:
        prec = self.prec
        ech = self._echelons.get(prec)
        if ech is None:
            d = self.dim
            m = min(self.sturm, prec)
            rows = [list(b.coeffs) + [1 if i == j else 0 for j in range(d)]
                    for i, b in enumerate(self.basis)]
            ints, piv = linalg.echelon_int(rows, ncols=m)
            if len(ints) != d:
                raise InternalConsistencyError(
                    f"basis of {self.kind}_{self.weight}({self.level}) is dependent "
                    f"on the first {m} coefficients (rank {len(ints)} < {d})")
            ech = Echelon(prec, [r[:prec] for r in ints], piv, [r[prec:] for r in ints])
            self._echelons[prec] = ech
        return ech

    def echelon_series(self) -> list[QSeries]:
        """Basis ``E_i`` with ``E_i`` having coefficient 1 at pivot ``i`` and 0 at the others."""
        ech = self.echelon()
        return [QSeries._raw(ech.normalized(i)) for i in range(self.dim)]

    def combination(self, coords) -> QSeries:
        """``sum coords[i] * basis[i]``."""
        n = self.prec
        out = [0] * n
        for c, b in zip(coords, self.basis):
            if c:
                bc = b.coeffs
                for j in range(n):
                    if bc[j]:
                        out[j] += c * bc[j]
        return QSeries._raw([linalg._norm(x) for x in out])


def basis_Mk(N: int, k: int, prec: int) -> FormSpace:
    _check_level(N)
    if k < 0 or k % 2:
        raise ValueError(f"weight must be even and nonnegative, got {k!r}")
    return FormSpace(N, k, "M", monomial_series(N, k, prec), monomials(N, k))


def basis_Sk(N: int, k: int, prec: int) -> FormSpace:
    """Cusp forms of weight ``k``: ``Delta_N`` times the monomials of weight ``k - w_N``."""
    _check_level(N)
    if k % 2:
        raise ValueError(f"weight must be even, got {k!r}")
    w = DELTA_WEIGHT[N]
    if k < w:
        return FormSpace(N, k, "S", [], [])
    D = delta_series(N, prec)
    return FormSpace(N, k, "S", [series_mul(D, m) for m in monomial_series(N, k - w, prec)],
                     monomials(N, k - w))


def echelon_coordinates(f: QSeries, S: FormSpace) -> list:
    """Coordinates of ``f`` in the echelon basis of ``S``; raises NotInSpaceError."""
    ech = S.echelon()
    n = min(f.prec, S.prec)
    if n < min(S.sturm, S.prec) or (S.dim and n <= max(ech.pivots)):
        raise PrecisionError(f"need at least {S.sturm} coefficients, have {n}")
    ys = [f.coeffs[c] for c in ech.pivots]
    resid = list(f.coeffs[:n])
    for y, r, c in zip(ys, ech.rows, ech.pivots):
        if y:
            d = r[c]
            for j in range(n):
                if r[j]:
                    resid[j] -= y * (r[j] // d) if r[j] % d == 0 else y * Fraction(r[j], d)
    for j, x in enumerate(resid):
        if x != 0:
            raise NotInSpaceError(j)
    return ys


def solve_in_basis(f: QSeries, S: FormSpace) -> list:
    """Exact coordinates of ``f`` in the basis of ``S``.

    Raises :class:`PrecisionError` when ``f`` or the basis is shorter than the
    Sturm precision and :class:`NotInSpaceError` (with the first offending
    coefficient index) when ``f`` is not in the space.
    """
    need = sturm_precision(S.level, S.weight)
    if f.prec < need or (S.dim and S.prec < need):
        raise PrecisionError(f"need {need} coefficients for weight {S.weight} level {S.level}; "
                             f"have series {f.prec}, basis {S.prec}")
    if S.dim == 0:
        for j, x in enumerate(f.coeffs):
            if x != 0:
                raise NotInSpaceError(j)
        return []
    ys = echelon_coordinates(f, S)
    ech = S.echelon()
    out = [0] * S.dim
    for y, r, c, t in zip(ys, ech.rows, ech.pivots, ech.transform):
        if y:
            d = r[c]
            for i, x in enumerate(t):
                if x:
                    out[i] += Fraction(y) * x / d
    return [linalg._norm(x) for x in out]
