"""Truncated power series in q with exact coefficients."""
from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpz

from .exactnum import QuadExt


class PrecisionError(ValueError):
    """Not enough known coefficients to answer exactly."""


class InexactDivisionError(ArithmeticError):
    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


def _scalar(x):
    if isinstance(x, (int, Fraction, QuadExt)):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


class QSeries:
    """Coefficients ``a_0 .. a_{prec-1}`` of a power series in ``q``.

    Coefficients are ``int``, ``Fraction`` or ``QuadExt``.  Arithmetic keeps the
    smaller precision of the operands and never invents coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, prec: int | None = None):
        cs = [_scalar(c) for c in coeffs]
        if prec is not None:
            if prec < len(cs):
                cs = cs[:prec]
            else:
                cs.extend([0] * (prec - len(cs)))
        if not cs:
            raise ValueError("a QSeries needs at least one coefficient")
        self.coeffs = cs

    @classmethod
    def _raw(cls, coeffs: list) -> "QSeries":
        s = cls.__new__(cls)
        s.coeffs = coeffs
        return s

    @classmethod
    def constant(cls, c, prec: int) -> "QSeries":
        return cls._raw([_scalar(c)] + [0] * (prec - 1))

    @classmethod
    def zero(cls, prec: int) -> "QSeries":
        return cls._raw([0] * prec)

    @classmethod
    def monomial(cls, n: int, prec: int, c=1) -> "QSeries":
        cs = [0] * prec
        if n < prec:
            cs[n] = c
        return cls._raw(cs)

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.coeffs[n]
        if n >= len(self.coeffs) or n < 0:
            raise PrecisionError(f"coefficient {n} unknown (prec {len(self.coeffs)})")
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise PrecisionError(f"cannot raise precision {self.prec} to {prec}")
        return QSeries._raw(self.coeffs[:prec])

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return None

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    # --- linear structure -------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.prec)
        n = min(self.prec, other.prec)
        a, b = self.coeffs, other.coeffs
        return QSeries._raw([a[i] + b[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.prec)
        n = min(self.prec, other.prec)
        a, b = self.coeffs, other.coeffs
        return QSeries._raw([a[i] - b[i] for i in range(n)])

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _scalar(c)
        return QSeries._raw([c * x for x in self.coeffs])

    def __truediv__(self, c):
        if isinstance(c, QSeries):
            return divide_exact(self, c)
        c = _scalar(c)
        if isinstance(c, int):
            c = Fraction(c)
        return QSeries._raw([_normalize(x / c) for x in self.coeffs])

    # --- ring structure ---------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        return series_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        return series_pow(self, e)

    def substitute(self, h: int) -> "QSeries":
        return series_substitute(self, h)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.prec, other.prec)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n))

    __hash__ = None

    def map(self, fn) -> "QSeries":
        return QSeries._raw([fn(c) for c in self.coeffs])

    def __repr__(self):
        shown = []
        for n, c in enumerate(self.coeffs[:8]):
            if c != 0:
                shown.append(f"{c}*q^{n}" if n else f"{c}")
        body = " + ".join(shown) if shown else "0"
        return f"QSeries({body} + O(q^{self.prec}))"


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _is_int_list(cs) -> bool:
    return all(type(c) is int for c in cs)


def _pack(xs: list[int], nbytes: int):
    return mpz(int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in xs), "little"))


def _unpack(C, nbytes: int, n: int) -> list[int]:
    C = C & ((mpz(1) << (8 * nbytes * n)) - 1)
    raw = int(C).to_bytes(nbytes * n, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(n)]


def _kronecker_mul(a: list[int], b: list[int], n: int) -> list[int]:
    """Product of integer coefficient lists truncated to ``n`` terms.

    Packs each list into one big integer (Kronecker substitution) with a slot
    width that fits every product coefficient, so unpacking is exact.  Signs
    are handled by splitting each list into positive and negative parts.
    """
    a = a[:n]
    b = b[:n]
    bound = max(max(abs(x) for x in a), 1) * max(max(abs(x) for x in b), 1) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 1) // 8 + 1
    ap = [x if x > 0 else 0 for x in a]
    an = [-x if x < 0 else 0 for x in a]
    bp = [x if x > 0 else 0 for x in b]
    bn = [-x if x < 0 else 0 for x in b]
    Ap, Bp = _pack(ap, nbytes), _pack(bp, nbytes)
    has_an, has_bn = any(an), any(bn)
    An = _pack(an, nbytes) if has_an else 0
    Bn = _pack(bn, nbytes) if has_bn else 0
    pos = Ap * Bp + (An * Bn if has_an and has_bn else 0)
    neg = (Ap * Bn if has_bn else 0) + (An * Bp if has_an else 0)
    P = _unpack(pos, nbytes, n)
    if not neg:
        return P
    Q = _unpack(neg, nbytes, n)
    return [x - y for x, y in zip(P, Q)]


def series_mul(f: QSeries, g: QSeries) -> QSeries:
    """Truncated Cauchy product."""
    n = min(f.prec, g.prec)
    a, b = f.coeffs, g.coeffs
    if n > 24 and _is_int_list(a[:n]) and _is_int_list(b[:n]):
        return QSeries._raw(_kronecker_mul(a, b, n))
    out = [0] * n
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        lim = n - i
        for j in range(lim):
            bj = b[j]
            if bj != 0:
                out[i + j] += ai * bj
    return QSeries._raw(out)


def series_pow(f: QSeries, e: int) -> QSeries:
    if not isinstance(e, int) or e < 0:
        raise ValueError("exponent must be a nonnegative integer")
    result = QSeries.constant(1, f.prec)
    base = f
    while e:
        if e & 1:
            result = series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    return result


def series_substitute(f: QSeries, h: int) -> QSeries:
    """``f(q^h)``; the result has the same precision as ``f``."""
    if not isinstance(h, int) or h <= 0:
        raise ValueError(f"substitution exponent must be a positive integer, got {h!r}")
    out = [0] * f.prec
    for i in range(0, (f.prec + h - 1) // h):
        out[i * h] = f.coeffs[i]
    return QSeries._raw(out)


def divide_exact(f: QSeries, g: QSeries) -> QSeries:
    """Return ``h`` with ``f == g*h`` to the available precision.

    ``g`` may start at a positive valuation ``v``; then ``f`` must vanish below
    ``v`` and the quotient has precision ``min(prec) - v``.
    """
    v = g.valuation()
    if v is None:
        raise ZeroDivisionError("division by the zero series")
    n = min(f.prec, g.prec)
    for i in range(v):
        if f.coeffs[i] != 0:
            raise InexactDivisionError(i, f"dividend has nonzero coefficient at q^{i} below divisor valuation {v}")
    m = n - v
    fs = f.coeffs[v:v + m]
    gs = g.coeffs[v:v + m]
    lead = gs[0]
    inv = Fraction(1, lead) if isinstance(lead, int) else 1 / lead
    out = []
    for k in range(m):
        acc = fs[k]
        for j in range(1, k + 1):
            gj = gs[j]
            if gj != 0:
                acc = acc - gj * out[k - j]
        out.append(_normalize(acc * inv))
    return QSeries._raw(out)


def series_linear(terms, prec: int | None = None) -> QSeries:
    """Sum of ``c * f`` over ``(c, f)`` pairs."""
    terms = list(terms)
    n = min(f.prec for _, f in terms)
    if prec is not None:
        n = min(n, prec)
    out = [0] * n
    for c, f in terms:
        if c == 0:
            continue
        fc = f.coeffs
        for i in range(n):
            x = fc[i]
            if x != 0:
                out[i] += c * x
    return QSeries._raw([_normalize(x) for x in out])
