"""Exact scalars: rationals, real quadratic numbers a + b*sqrt(D), integer polynomials.

Rationals are plain :class:`fractions.Fraction` values.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from numbers import Rational as _RationalABC

import mpmath
from sympy import factorint

Rational = Fraction


class FieldMismatchError(ArithmeticError):
    """Raised when combining quadratic numbers from different fields."""


@lru_cache(maxsize=4096)
def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``s`` squarefree."""
    if not isinstance(n, int) or n <= 0:
        raise ValueError(f"squarefree_decompose needs a positive integer, got {n!r}")
    s, f = 1, 1
    for p, e in factorint(n).items():
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    return s, f


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class QuadExt:
    """Immutable number ``rat + irr*sqrt(radicand)`` with squarefree ``radicand >= 1``.

    ``radicand == 1`` means the value is rational (and then ``irr == 0``).
    """

    __slots__ = ("rat", "irr", "radicand")

    def __init__(self, rat=0, irr=0, radicand: int = 1):
        rat = _as_fraction(rat)
        irr = _as_fraction(irr)
        if not isinstance(radicand, int) or radicand <= 0:
            raise ValueError(f"radicand must be a positive integer, got {radicand!r}")
        s, f = squarefree_decompose(radicand)
        irr *= f
        if s == 1:
            rat, irr = rat + irr, Fraction(0)
        if irr == 0:
            s = 1
        object.__setattr__(self, "rat", rat)
        object.__setattr__(self, "irr", irr)
        object.__setattr__(self, "radicand", s)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def sqrt(cls, n) -> "QuadExt":
        """Square root of a nonnegative rational, ``sqrt(a/b) = sqrt(ab)/b``."""
        n = _as_fraction(n)
        if n < 0:
            raise ValueError("negative radicands are not supported")
        if n == 0:
            return cls()
        return cls(0, Fraction(1, n.denominator), n.numerator * n.denominator)

    @staticmethod
    def coerce(x) -> "QuadExt":
        return x if isinstance(x, QuadExt) else QuadExt(x)

    def _field(self, other: "QuadExt") -> int:
        if self.radicand == 1:
            return other.radicand
        if other.radicand in (1, self.radicand):
            return self.radicand
        raise FieldMismatchError(
            f"Q(sqrt({self.radicand})) and Q(sqrt({other.radicand})) do not match")

    @property
    def is_rational(self) -> bool:
        return self.irr == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.rat, -self.irr, self.radicand)

    def norm(self) -> Fraction:
        return self.rat * self.rat - self.radicand * self.irr * self.irr

    def trace(self) -> Fraction:
        return 2 * self.rat

    def __add__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadExt(self.rat + o.rat, self.irr + o.irr, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.rat, -self.irr, self.radicand)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadExt(self.rat - o.rat, self.irr - o.irr, D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadExt(self.rat * o.rat + D * self.irr * o.irr,
                       self.rat * o.irr + self.irr * o.rat, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in QuadExt")
        c = o.conjugate()
        num = self * c
        return QuadExt(num.rat / n, num.irr / n, num.radicand)

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) / self

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        out = QuadExt(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.rat, self.irr, self.radicand) == (o.rat, o.irr, o.radicand)

    def __hash__(self):
        if self.irr == 0:
            return hash(self.rat)
        return hash((self.rat, self.irr, self.radicand))

    def __bool__(self):
        return self.rat != 0 or self.irr != 0

    def __float__(self):
        return float(self.rat) + float(self.irr) * self.radicand ** 0.5

    def __repr__(self):
        return f"QuadExt({self})"

    def __str__(self):
        if self.irr == 0:
            return str(self.rat)
        b = self.irr
        mag = "" if abs(b) == 1 else f"{abs(b)}*"
        sqrt_part = f"{mag}sqrt({self.radicand})"
        if self.rat == 0:
            return ("-" if b < 0 else "") + sqrt_part
        return f"{self.rat} {'-' if b < 0 else '+'} {sqrt_part}"


class IntPoly:
    """Immutable univariate polynomial with integer coefficients, low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) if not isinstance(c, int) else c for c in coeffs]
        for c, orig in zip(cs, coeffs):
            if c != orig:
                raise ValueError(f"non-integer coefficient {orig!r}")
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    @classmethod
    def from_roots(cls, roots) -> "IntPoly":
        p = [1]
        for r in roots:
            q = [0] * (len(p) + 1)
            for i, c in enumerate(p):
                q[i + 1] += c
                q[i] -= r * c
            p = q
        return cls(p)

    @classmethod
    def from_rational(cls, coeffs) -> "IntPoly":
        """Build from rational coefficients, failing loudly if any is not integral."""
        out = []
        for c in coeffs:
            c = Fraction(c)
            if c.denominator != 1:
                raise ValueError(f"coefficient {c} is not an integer")
            out.append(c.numerator)
        return cls(out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self[i] - other[i] for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return IntPoly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = IntPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def divmod_monic(self, divisor: "IntPoly") -> tuple["IntPoly", "IntPoly"]:
        if not divisor.is_monic:
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return IntPoly([]), self
        quot = [0] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c:
                quot[i - dd] = c
                for j, b in enumerate(divisor.coeffs):
                    rem[i - dd + j] -= c * b
        return IntPoly(quot), IntPoly(rem[:dd])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                xs = "X" if i == 1 else f"X^{i}"
                body = xs if a == 1 else f"{a}*{xs}"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def _rat_poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            c = r[-1] / b[-1]
            shift = len(r) - len(b)
            for j, bj in enumerate(b):
                r[shift + j] -= c * bj
            trim(r)
        a, b = b, r
    lead = a[-1]
    return [c / lead for c in a]


def _squarefree_part(p: IntPoly) -> IntPoly:
    g = _rat_poly_gcd([Fraction(c) for c in p.coeffs],
                      [Fraction(c) for c in p.derivative().coeffs])
    if len(g) == 1:
        return p
    # g is monic with rational coefficients; p/g is monic with integer coefficients
    rem = [Fraction(c) for c in p.coeffs]
    dg = len(g) - 1
    quot = [Fraction(0)] * (len(rem) - dg)
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i]
        quot[i - dg] = c
        for j, b in enumerate(g):
            rem[i - dg + j] -= c * b
    return IntPoly.from_rational(quot)


def _numeric_roots(p: IntPoly):
    bits = max(abs(c).bit_length() for c in p.coeffs)
    dps = max(30, bits // 3 + 20 * p.degree)
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(list(reversed(p.coeffs)), maxsteps=400 + 40 * p.degree,
                                 extraprec=4 * dps, cleanup=True)
    return roots, dps


def _nearest_int(x) -> int:
    return int(mpmath.nint(mpmath.re(x)))


def factor_int_poly(p: IntPoly, max_factor_degree: int = 2):
    """Split a monic integer polynomial into linear and quadratic factors.

    Returns ``(factors, remainder)``: ``factors`` lists monic factors of degree
    at most ``max_factor_degree`` (with repetition), ``remainder`` is the
    cofactor that has no such factor (``None`` when everything split).
    ``prod(factors) * remainder == p`` always holds.
    """
    if not p.is_monic:
        raise ValueError("factor_int_poly expects a monic polynomial")
    if max_factor_degree not in (1, 2):
        raise ValueError("max_factor_degree must be 1 or 2")
    factors: list[IntPoly] = []
    rest = p
    # strip powers of X first
    while rest.degree > 0 and rest[0] == 0:
        factors.append(IntPoly([0, 1]))
        rest = IntPoly(rest.coeffs[1:])
    candidates: list[IntPoly] = []
    if rest.degree >= 1:
        sqf = _squarefree_part(rest)
        if sqf.degree == 1:
            candidates.append(sqf)
        elif sqf.degree == 2 and max_factor_degree == 2:
            candidates.extend(_split_quadratic(sqf))
        elif sqf.degree >= 2:
            roots, _ = _numeric_roots(sqf)
            for r in roots:
                c = _nearest_int(r)
                cand = IntPoly([-c, 1])
                if cand not in candidates and sqf.divmod_monic(cand)[1].degree < 0:
                    candidates.append(cand)
            if max_factor_degree == 2:
                n = len(roots)
                for i in range(n):
                    for j in range(i + 1, n):
                        b = -_nearest_int(roots[i] + roots[j])
                        c = _nearest_int(roots[i] * roots[j])
                        cand = IntPoly([c, b, 1])
                        if cand in candidates or _split_quadratic(cand) != [cand]:
                            continue
                        if sqf.divmod_monic(cand)[1].degree < 0:
                            candidates.append(cand)
    for cand in sorted(candidates, key=lambda q: (q.degree, q.coeffs)):
        while rest.degree >= cand.degree:
            q, r = rest.divmod_monic(cand)
            if r.degree >= 0:
                break
            factors.append(cand)
            rest = q
    factors.sort(key=lambda q: (q.degree, q.coeffs))
    return factors, (None if rest.degree == 0 else rest)


def _split_quadratic(q: IntPoly) -> list[IntPoly]:
    c, b, _ = q.coeffs
    disc = b * b - 4 * c
    if disc >= 0:
        s = isqrt(disc)
        if s * s == disc:
            return [IntPoly([-((-b + s) // 2), 1]), IntPoly([-((-b - s) // 2), 1])]
    return [q]


def content(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
