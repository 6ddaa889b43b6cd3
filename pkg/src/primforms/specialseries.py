"""Named q-series: Eisenstein series, level-N weight-2 series, theta-like
character series, the alpha family and the seven cusp forms Delta_N.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
import threading

from .qseries import QSeries, series_mul, series_substitute, series_linear

LEVELS = (1, 2, 3, 4, 6, 8, 9)
DELTA_WEIGHT = {1: 12, 2: 8, 3: 6, 4: 6, 6: 4, 8: 4, 9: 4}


@dataclass(frozen=True)
class DirichletCharacter:
    """Real character modulo 3 or 4, given by its values on ``0..modulus-1``."""

    modulus: int
    values: tuple[int, ...]

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]


RHO3 = DirichletCharacter(3, (0, 1, -1))
RHO4 = DirichletCharacter(4, (0, 1, 0, -1))
TRIVIAL = DirichletCharacter(1, (1,))


@dataclass(frozen=True)
class NamedSeries:
    name: str
    level: int
    weight: int
    series: QSeries


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number ``B_k`` (``B_1 = -1/2`` convention) for even ``k >= 2``."""
    if not isinstance(k, int) or k < 2 or k % 2:
        raise ValueError(f"bernoulli expects an even integer k >= 2, got {k!r}")
    return _bernoulli_table(k)[k]


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(B)


_lock = threading.Lock()
_sigma_cache: dict[tuple[int, int], list[int]] = {}


def divisor_sums(e: int, prec: int) -> list[int]:
    """``sigma_e(n)`` for ``0 <= n < prec`` by sieving (entry 0 is 0)."""
    with _lock:
        cached = _sigma_cache.get(e)
        if cached is not None and len(cached) >= prec:
            return cached[:prec]
    out = [0] * prec
    for d in range(1, prec):
        de = d ** e
        for n in range(d, prec, d):
            out[n] += de
    with _lock:
        _sigma_cache[e] = out
    return list(out)


def eisenstein(k: int, prec: int) -> QSeries:
    """``E_k = 1 - (2k/B_k) * sum sigma_{k-1}(n) q^n``; ``k = 2`` gives the quasi-modular E_2."""
    if not isinstance(k, int) or k < 2 or k % 2:
        raise ValueError(f"eisenstein expects an even weight k >= 2, got {k!r}")
    c = -Fraction(2 * k) / bernoulli(k)
    sig = divisor_sums(k - 1, prec)
    if c.denominator == 1:
        ci = c.numerator
        cs = [1] + [ci * s for s in sig[1:]]
    else:
        cs = [1] + [_norm(c * s) for s in sig[1:]]
    return QSeries._raw(cs)


def _norm(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def character_series(chi: DirichletCharacter, prec: int) -> QSeries:
    """``F = 1 + c * sum_n (sum_{d|n} chi(d)) q^n`` with ``c = 6`` for rho_3, ``4`` for rho_4."""
    if chi == RHO3:
        c = 6
    elif chi == RHO4:
        c = 4
    else:
        raise ValueError(f"unsupported character {chi!r}")
    out = [0] * prec
    for d in range(1, prec):
        v = chi(d)
        if v:
            for n in range(d, prec, d):
                out[n] += v
    out = [c * x for x in out]
    out[0] = 1
    return QSeries._raw(out)


def level_series(N: int, prec: int) -> QSeries:
    """``C_N = (N*E_2(q^N) - E_2) / gcd(N-1, 24)``."""
    if N not in (2, 3, 4, 6, 8, 9):
        raise ValueError(f"C_N is defined here for N in 2,3,4,6,8,9; got {N!r}")
    e2 = eisenstein(2, prec)
    g = gcd(N - 1, 24)
    raw = series_linear([(N, series_substitute(e2, N)), (-1, e2)])
    return QSeries._raw([x // g for x in raw.coeffs]) if all(x % g == 0 for x in raw.coeffs) else raw / g


def _exact_div(f: QSeries, c: int) -> QSeries:
    if any(x % c for x in f.coeffs):
        raise ArithmeticError(f"series not divisible by {c}")
    return QSeries._raw([x // c for x in f.coeffs])


@lru_cache(maxsize=64)
def _alpha_cached(N: int, prec: int) -> QSeries:
    if N == 6:
        F3 = character_series(RHO3, prec)
        return _exact_div(F3 - series_substitute(F3, 2), 6)
    if N == 8:
        F4 = character_series(RHO4, prec)
        return _exact_div(F4 - series_substitute(F4, 2), 4)
    if N == 9:
        F3 = character_series(RHO3, prec)
        return _exact_div(F3 - series_substitute(F3, 3), 6)
    if N == 4:
        F4 = character_series(RHO4, prec)
        return series_mul(series_substitute(F4, 2), _alpha_cached(8, prec))
    if N == 2:
        return series_mul(level_series(4, prec), _alpha_cached(4, prec))
    if N == 3:
        return series_mul(level_series(9, prec), _alpha_cached(9, prec))
    raise ValueError(f"alpha_N is defined for N in 2,3,4,6,8,9; got {N!r}")


def alpha_series(N: int, prec: int) -> QSeries:
    return _alpha_cached(N, prec)


@lru_cache(maxsize=64)
def _delta_cached(N: int, prec: int) -> QSeries:
    if N == 1:
        E4, E6 = eisenstein(4, prec), eisenstein(6, prec)
        return _exact_div(E4 ** 3 - E6 ** 2, 1728)
    if N == 2:
        a2, C2 = alpha_series(2, prec), level_series(2, prec)
        return a2 * (C2 ** 2 - a2.scale(64))
    if N == 3:
        a3, F3 = alpha_series(3, prec), character_series(RHO3, prec)
        return a3 * (F3 ** 3 - a3.scale(27))
    if N == 4:
        return alpha_series(2, prec) * (level_series(4, prec) - alpha_series(4, prec).scale(16))
    if N == 6:
        a6, F3 = alpha_series(6, prec), character_series(RHO3, prec)
        return a6 * (F3 - a6.scale(3)) * (F3 - a6.scale(4)) * (F3 - a6.scale(12))
    if N == 8:
        F4 = character_series(RHO4, prec)
        return alpha_series(4, prec) * F4 * (F4 - alpha_series(8, prec).scale(8))
    if N == 9:
        return alpha_series(3, prec) * (character_series(RHO3, prec) - alpha_series(9, prec).scale(9))
    raise ValueError(f"Delta_N is defined for N in {LEVELS}; got {N!r}")


def delta_series(N: int, prec: int) -> QSeries:
    if prec < 2:
        raise ValueError("Delta_N needs prec >= 2")
    return _delta_cached(N, prec)


def named(name: str, prec: int) -> NamedSeries:
    """Look up a series by name: ``E4``, ``E2``, ``C6``, ``F3``, ``alpha9``, ``Delta2`` ..."""
    if name == "E2":
        return NamedSeries(name, 1, 2, eisenstein(2, prec))
    if name.startswith("E"):
        k = int(name[1:])
        return NamedSeries(name, 1, k, eisenstein(k, prec))
    if name.startswith("Delta"):
        N = int(name[5:])
        return NamedSeries(name, N, DELTA_WEIGHT[N], delta_series(N, prec))
    if name.startswith("alpha"):
        N = int(name[5:])
        w = {2: 4, 3: 3, 4: 2, 6: 1, 8: 1, 9: 1}[N]
        return NamedSeries(name, N, w, alpha_series(N, prec))
    if name == "F3":
        return NamedSeries(name, 3, 1, character_series(RHO3, prec))
    if name == "F4":
        return NamedSeries(name, 4, 1, character_series(RHO4, prec))
    if name.startswith("C"):
        N = int(name[1:])
        return NamedSeries(name, N, 2, level_series(N, prec))
    raise KeyError(name)
