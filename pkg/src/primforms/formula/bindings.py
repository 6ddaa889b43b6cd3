"""Symbol tables for the formula language, one per level.

Every symbol maps to an integer-or-rational q-series together with its weight.
At levels 4, 8 and 9 the displayed sets carry a global substitution
``q -> q^2`` (resp. ``q^3``); the tables below already contain the
substituted series, so an expression is evaluated as written and then
multiplied by ``Delta_N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..qseries import QSeries, series_mul, series_substitute
from ..specialseries import (RHO3, alpha_series, character_series, delta_series, eisenstein,
                             level_series)


class UnboundSymbolError(KeyError):
    pass


@dataclass(frozen=True)
class Binding:
    name: str
    weight: int
    build: object  # prec -> QSeries


@dataclass(frozen=True)
class BindingSet:
    name: str
    level: int
    symbols: dict
    global_sub: int = 1

    def weight(self, name: str) -> int:
        try:
            return self.symbols[name].weight
        except KeyError:
            raise UnboundSymbolError(f"symbol {name!r} is not bound in {self.name}") from None

    def series(self, name: str, prec: int) -> QSeries:
        try:
            b = self.symbols[name]
        except KeyError:
            raise UnboundSymbolError(f"symbol {name!r} is not bound in {self.name}") from None
        return _cached(self.name, name, prec)


def _scale(f: QSeries, c) -> QSeries:
    c = Fraction(c)
    if c.denominator == 1:
        n = c.numerator
        return QSeries._raw([n * x for x in f.coeffs])
    return QSeries._raw([_norm(c * x) for x in f.coeffs])


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _lin(*terms) -> QSeries:
    n = min(f.prec for _, f in terms)
    out = [0] * n
    for c, f in terms:
        c = Fraction(c)
        for i in range(n):
            if f.coeffs[i]:
                out[i] += c * f.coeffs[i]
    return QSeries._raw([_norm(Fraction(x)) for x in out])


def _E(k):
    return lambda n: eisenstein(k, n)


def _sub(build, h):
    return lambda n: series_substitute(build(n), h)


# level 1 ---------------------------------------------------------------------
def _level1():
    syms = {f"E{k}": Binding(f"E{k}", k, _E(k)) for k in (4, 6, 8, 10, 14)}
    syms["d"] = Binding("d", 12, lambda n: _scale(delta_series(1, n), 12))
    return syms


# level 2 ---------------------------------------------------------------------
def _C2(n):
    return level_series(2, n)


def _d2(n):
    return _scale(delta_series(2, n), 8)


def _G2(n):
    C = _C2(n)
    return series_mul(C, C) - _scale(alpha_series(2, n), 128)


def _H2(n):
    C = _C2(n)
    return C ** 4 + _scale(_d2(n), 18)


def _I2(n):
    C = _C2(n)
    return C ** 4 - _scale(_d2(n), 81)


def _level2():
    syms = {
        "C2": Binding("C2", 2, _C2),
        "C": Binding("C", 2, _C2),
        "G": Binding("G", 4, _G2),
        "H": Binding("H", 8, _H2),
        "I": Binding("I", 8, _I2),
        "d": Binding("d", 8, _d2),
    }
    return syms


# level 3 ---------------------------------------------------------------------
def _C3(n):
    return level_series(3, n)


def _d3(n):
    return _scale(delta_series(3, n), 3)


def _G3(n):
    F = character_series(RHO3, n)
    return series_mul(F, F ** 3 - _scale(alpha_series(3, n), 54))


def _I3(n):
    return _C3(n) ** 3 + _scale(_d3(n), 64)


def _level3():
    return {
        "C3": Binding("C3", 2, _C3),
        "C": Binding("C", 2, _C3),
        "G": Binding("G", 4, _G3),
        "I": Binding("I", 6, _I3),
        "d": Binding("d", 6, _d3),
    }


# level 4 (global q -> q^2) -------------------------------------------------------
def _level4():
    syms = {f"E{k}": Binding(f"E{k}", k, _sub(_E(k), 2)) for k in (4, 6, 8, 10, 14)}
    syms["d"] = Binding("d", 12, _sub(lambda n: _scale(delta_series(1, n), 192), 2))
    return syms


# level 6 ---------------------------------------------------------------------
def _Gn(num: int, den: int = 1):
    """``G_n = (C3 + n*C3(q^2)) / (1 + n)`` with ``n = num/den``."""
    r = Fraction(num, den)

    def build(n):
        C = _C3(n)
        return _lin((1 / (1 + r), C), (r / (1 + r), series_substitute(C, 2)))
    return build


def _C6(n):
    C = _C2(n)
    return _lin((Fraction(1, 4), C), (Fraction(3, 4), series_substitute(C, 3)))


def _d6(n):
    return _scale(delta_series(6, n), 2)


def _level6():
    def sq_plus(c):
        return lambda n: series_mul(_C6(n), _C6(n)) + _scale(_d6(n), c)
    return {
        "C": Binding("C", 2, _C6),
        "G2": Binding("G2", 2, _Gn(2)),
        "Gm2": Binding("Gm2", 2, _Gn(-2)),
        "H": Binding("H", 4, sq_plus(6)),
        "I": Binding("I", 4, sq_plus(-27)),
        "J": Binding("J", 4, sq_plus(-50)),
        "d": Binding("d", 4, _d6),
    }


# level 8 (global q -> q^2) -------------------------------------------------------
def _level8():
    return {
        "C2": Binding("C2", 2, _sub(_C2, 2)),
        "C": Binding("C", 2, _sub(_C2, 2)),
        "G": Binding("G", 4, _sub(_G2, 2)),
        "d": Binding("d", 8, _sub(lambda n: _scale(delta_series(2, n), 64), 2)),
    }


# level 9 (global q -> q^3) -------------------------------------------------------
def _level9():
    syms = {f"E{k}": Binding(f"E{k}", k, _sub(_E(k), 3)) for k in (4, 6, 8, 10, 14)}
    syms["d1"] = Binding("d1", 12, _sub(lambda n: _scale(delta_series(1, n), 216), 3))
    # d9 = 3 Delta9^(1/3); after the global substitution this is 3 Delta9
    syms["d9"] = Binding("d9", 4, lambda n: _scale(delta_series(9, n), 3))
    return syms


_TABLES = {1: _level1, 2: _level2, 3: _level3, 4: _level4, 6: _level6, 8: _level8, 9: _level9}
_SUBS = {4: 2, 8: 2, 9: 3}


@lru_cache(maxsize=None)
def binding_set(level: int) -> BindingSet:
    if level not in _TABLES:
        raise ValueError(f"no binding set for level {level}")
    return BindingSet(f"L{level}", level, _TABLES[level](), _SUBS.get(level, 1))


@lru_cache(maxsize=512)
def _cached(set_name: str, sym: str, prec: int) -> QSeries:
    level = int(set_name[1:])
    return binding_set(level).symbols[sym].build(prec)


def delta9_support_ok(prec: int) -> bool:
    """``Delta_9`` is ``q`` times a series in ``q^3``, so ``Delta_9^(1/3)`` makes sense."""
    D = delta_series(9, prec)
    return all(c == 0 for n, c in enumerate(D.coeffs) if n % 3 != 1)


def identities(level: int, prec: int) -> list[tuple[str, QSeries, QSeries]]:
    """Pairs of alternative definitions that must agree as q-series."""
    out = []
    sub = series_substitute
    if level == 2:
        E4, E6, C = eisenstein(4, prec), eisenstein(6, prec), _C2(prec)
        out.append(("H = E4 E4(q^2)", _H2(prec), series_mul(E4, sub(E4, 2))))
        out.append(("I = E6 E6(q^2) / C2^2", series_mul(_I2(prec), series_mul(C, C)),
                    series_mul(E6, sub(E6, 2))))
    elif level == 3:
        E4, C = eisenstein(4, prec), _C3(prec)
        out.append(("I = E4 E4(q^3) / C3", series_mul(_I3(prec), C), series_mul(E4, sub(E4, 3))))
    elif level == 6:
        F3, C2 = character_series(RHO3, prec), _C2(prec)
        C = _C6(prec)
        d = _d6(prec)
        out.append(("C = F3 F3(q^2)", C, series_mul(F3, sub(F3, 2))))
        out.append(("H = C2 C2(q^3)", series_mul(C, C) + _scale(d, 6), series_mul(C2, sub(C2, 3))))
        out.append(("I = G_-3 G_-4/3", series_mul(C, C) - _scale(d, 27),
                    series_mul(_Gn(-3)(prec), _Gn(-4, 3)(prec))))
        J2 = series_mul(_lin((Fraction(-1, 6), C2), (Fraction(7, 6), sub(C2, 3))),
                        _lin((Fraction(-7, 2), C2), (Fraction(9, 2), sub(C2, 3))))
        out.append(("J = (-C2+7C2(q^3))/6 * (-7C2+9C2(q^3))/2", series_mul(C, C) - _scale(d, 50), J2))
    return out
