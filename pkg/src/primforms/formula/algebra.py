"""Exact evaluation of parsed expressions.

An expression is evaluated once, symbolically in its markers: the value is a
map from a set of atoms to a rational q-series.  Atoms are the sign markers
``e_j`` (from ``pm``, with ``e_j^2 = 1``), the bound variable ``v``
(``v^2 = V``) and square roots ``s`` of integers or of ``m0 + m1*v``.
Individual conjugates are recovered by substituting values for the atoms;
the sum over all conjugates keeps only the atom-free part.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt

from ..exactnum import FieldMismatchError, IntPoly, QuadExt
from ..qseries import QSeries, series_mul, series_substitute
from .bindings import BindingSet
from .parser import BinOp, Neg, Num, Pm, Pow, Sqrt, Subst, Sym, Var, walk


class CapabilityError(ValueError):
    """The requested value needs a field of degree > 2."""


class UnsupportedEntryError(ValueError):
    """The expression uses a marker combination the evaluator cannot sum."""


class WeightError(ValueError):
    pass


# --- coefficients: Fraction (constant) or QSeries --------------------------

def _c_mul(a, b):
    if isinstance(a, QSeries):
        if isinstance(b, QSeries):
            return series_mul(a, b)
        return a.scale(b) if b != 1 else a
    if isinstance(b, QSeries):
        return b.scale(a) if a != 1 else b
    return a * b


def _c_add(a, b, prec: int):
    if isinstance(a, QSeries) or isinstance(b, QSeries):
        if not isinstance(a, QSeries):
            a = QSeries.constant(a, prec)
        if not isinstance(b, QSeries):
            b = QSeries.constant(b, prec)
        return a + b
    return a + b


def _c_zero(c) -> bool:
    if isinstance(c, QSeries):
        return c.is_zero()
    return c == 0


@dataclass
class Context:
    """Atom bookkeeping for one evaluation."""

    v_square: Fraction | None = None
    squares: dict = field(default_factory=dict)  # atom -> {key: Fraction}
    sqrt_atoms: dict = field(default_factory=dict)  # (m0, m1) -> atom
    sign_atoms: list = field(default_factory=list)
    _mono: dict = field(default_factory=dict)

    def mono_mul(self, ka: frozenset, kb: frozenset) -> dict:
        key = (ka, kb)
        hit = self._mono.get(key)
        if hit is not None:
            return hit
        result = {ka ^ kb: Fraction(1)}
        for atom in ka & kb:
            sq = self.squares[atom]
            nxt: dict = {}
            for k1, c1 in result.items():
                for k2, c2 in sq.items():
                    for k3, c3 in self.mono_mul(k1, k2).items():
                        nxt[k3] = nxt.get(k3, 0) + c1 * c2 * c3
            result = {k: c for k, c in nxt.items() if c != 0}
        self._mono[key] = result
        return result


Formal = dict  # frozenset of atoms -> Fraction | QSeries

_EMPTY = frozenset()


def _mul(a: Formal, b: Formal, ctx: Context, prec: int) -> Formal:
    out: Formal = {}
    for ka, fa in a.items():
        for kb, fb in b.items():
            prod = _c_mul(fa, fb)
            for k, c in ctx.mono_mul(ka, kb).items():
                term = _c_mul(prod, c)
                out[k] = _c_add(out[k], term, prec) if k in out else term
    return {k: c for k, c in out.items() if not _c_zero(c)}


def _add(a: Formal, b: Formal, prec: int, sign: int = 1) -> Formal:
    out = dict(a)
    for k, c in b.items():
        c = _c_mul(c, Fraction(sign)) if sign != 1 else c
        out[k] = _c_add(out[k], c, prec) if k in out else c
    return {k: c for k, c in out.items() if not _c_zero(c)}


def _constant_value(f: Formal):
    """``(m0, m1)`` if ``f = m0 + m1*v`` with rational constants, else None."""
    if any(not isinstance(c, Fraction) and not (isinstance(c, QSeries) and _is_const(c))
           for c in f.values()):
        return None
    if any(k not in (_EMPTY, frozenset({"v"})) for k in f):
        return None
    m0 = _as_const(f.get(_EMPTY, Fraction(0)))
    m1 = _as_const(f.get(frozenset({"v"}), Fraction(0)))
    return m0, m1


def _is_const(s: QSeries) -> bool:
    return all(c == 0 for c in s.coeffs[1:])


def _as_const(c) -> Fraction:
    return Fraction(c.coeffs[0]) if isinstance(c, QSeries) else Fraction(c)


def evaluate_formal(e, bindings: BindingSet, prec: int, v_square=None, ctx: Context | None = None):
    """Return ``(formal value, context)``."""
    if ctx is None:
        ctx = Context(None if v_square is None else Fraction(v_square))
        if ctx.v_square is not None:
            ctx.squares["v"] = {_EMPTY: ctx.v_square}
    return _eval(e, bindings, prec, ctx), ctx


def _eval(e, b: BindingSet, prec: int, ctx: Context) -> Formal:
    if isinstance(e, Num):
        return {_EMPTY: Fraction(e.value)} if e.value else {}
    if isinstance(e, Sym):
        return {_EMPTY: b.series(e.name, prec)}
    if isinstance(e, Var):
        if ctx.v_square is None:
            raise UnsupportedEntryError("v is used but no relation v^2 = V was given")
        return {frozenset({"v"}): Fraction(1)}
    if isinstance(e, Neg):
        return _add({}, _eval(e.arg, b, prec, ctx), prec, -1)
    if isinstance(e, BinOp):
        l = _eval(e.left, b, prec, ctx)
        r = _eval(e.right, b, prec, ctx)
        if e.op == "+":
            return _add(l, r, prec)
        if e.op == "-":
            return _add(l, r, prec, -1)
        if e.op == "*":
            return _mul(l, r, ctx, prec)
        cv = _constant_value(r)
        if cv is None or cv[1] != 0 or cv[0] == 0:
            raise UnsupportedEntryError("division is only by nonzero rational constants")
        return _mul(l, {_EMPTY: 1 / cv[0]}, ctx, prec)
    if isinstance(e, Pow):
        base = _eval(e.base, b, prec, ctx)
        result: Formal = {_EMPTY: Fraction(1)}
        n = e.exp
        while n:
            if n & 1:
                result = _mul(result, base, ctx, prec)
            n >>= 1
            if n:
                base = _mul(base, base, ctx, prec)
        return result
    if isinstance(e, Subst):
        inner = _eval(e.arg, b, prec, ctx)
        return {k: series_substitute(c, e.h) if isinstance(c, QSeries) else c for k, c in inner.items()}
    if isinstance(e, Pm):
        atom = f"e{len(ctx.sign_atoms)}"
        ctx.sign_atoms.append(atom)
        ctx.squares[atom] = {_EMPTY: Fraction(1)}
        inner = _eval(e.arg, b, prec, ctx)
        return _mul(inner, {frozenset({atom}): Fraction(1)}, ctx, prec)
    if isinstance(e, Sqrt):
        inner = _eval(e.arg, b, prec, ctx)
        cv = _constant_value(inner)
        if cv is None:
            raise CapabilityError("square root of a non-constant or nested expression")
        m0, m1 = cv
        if m1 == 0:
            if m0 < 0:
                raise UnsupportedEntryError("square root of a negative number")
            if m0.denominator == 1 and isqrt(m0.numerator) ** 2 == m0.numerator:
                return {_EMPTY: Fraction(isqrt(m0.numerator))} if m0 else {}
        atom = ctx.sqrt_atoms.get((m0, m1))
        if atom is None:
            atom = f"s{len(ctx.sqrt_atoms)}"
            ctx.sqrt_atoms[(m0, m1)] = atom
            sq = {_EMPTY: m0}
            if m1:
                sq[frozenset({"v"})] = m1
            ctx.squares[atom] = sq
        return {frozenset({atom}): Fraction(1)}
    raise TypeError(f"unknown node {e!r}")


# --- weights ---------------------------------------------------------------

def weight(e, b: BindingSet) -> int:
    """Weight of a homogeneous expression; raises :class:`WeightError` otherwise."""
    if isinstance(e, Num):
        return 0
    if isinstance(e, Sym):
        return b.weight(e.name)
    if isinstance(e, Var):
        return 0
    if isinstance(e, Sqrt):
        w = weight(e.arg, b)
        if w:
            raise WeightError("square root of a form of positive weight")
        return 0
    if isinstance(e, (Pm, Neg)):
        return weight(e.arg, b)
    if isinstance(e, Subst):
        return weight(e.arg, b)
    if isinstance(e, Pow):
        return weight(e.base, b) * e.exp
    if isinstance(e, BinOp):
        wl, wr = weight(e.left, b), weight(e.right, b)
        if e.op in "+-":
            if wl != wr and not (_is_zero_literal(e.left) or _is_zero_literal(e.right)):
                raise WeightError(f"adding weight {wl} to weight {wr}")
            return max(wl, wr)
        if e.op == "*":
            return wl + wr
        if wr:
            raise WeightError("division by a form of positive weight")
        return wl
    raise TypeError(f"unknown node {e!r}")


def _is_zero_literal(e) -> bool:
    return isinstance(e, Num) and e.value == 0


# --- conjugates -------------------------------------------------------------

def expand_conjugates(e, v_square=None) -> list:
    """One expression per choice of sign in every ``pm`` and root of ``v^2 = V``.

    ``pm(x)`` becomes ``x`` or ``-x``; ``v`` becomes ``sqrt(V)`` or ``-sqrt(V)``.
    """
    pms = [n for n in walk(e) if isinstance(n, Pm)]
    has_v = any(isinstance(n, Var) for n in walk(e))
    if has_v and v_square is None:
        raise UnsupportedEntryError("v is used but no relation v^2 = V was given")
    out = []
    v_choices = [1, -1] if has_v else [None]
    for signs in product((1, -1), repeat=len(pms)):
        for vs in v_choices:
            out.append(_replace(e, pms, signs, vs, v_square))
    return out


def _replace(e, pms, signs, vs, V):
    def go(n):
        if isinstance(n, Pm):
            idx = next(i for i, p in enumerate(pms) if p is n)
            inner = go(n.arg)
            return inner if signs[idx] == 1 else Neg(inner)
        if isinstance(n, Var):
            r = Sqrt(Num(int(V)))
            return r if vs == 1 else Neg(r)
        if isinstance(n, (Sqrt, Neg)):
            return type(n)(go(n.arg))
        if isinstance(n, Subst):
            return Subst(go(n.arg), n.h)
        if isinstance(n, Pow):
            return Pow(go(n.base), n.exp)
        if isinstance(n, BinOp):
            return BinOp(n.op, go(n.left), go(n.right))
        return n
    return go(e)


def conjugate_count(e) -> int:
    pms = sum(1 for n in walk(e) if isinstance(n, Pm))
    has_v = any(isinstance(n, Var) for n in walk(e))
    return 2 ** (pms + int(has_v))


def _series_of(c, prec: int) -> QSeries:
    return c if isinstance(c, QSeries) else QSeries.constant(c, prec)


def single_values(formal: Formal, ctx: Context, prec: int) -> list[list]:
    """Coefficient lists (QuadExt) of every conjugate, in ``pm`` sign order (+ first).

    Raises :class:`CapabilityError` when ``v`` is present or the square roots
    span a field of degree > 2.
    """
    if ctx.v_square is not None and any("v" in k for k in formal):
        raise CapabilityError("pointwise evaluation with v needs a degree-4 field")
    roots = {}
    for (m0, m1), atom in ctx.sqrt_atoms.items():
        if m1:
            raise CapabilityError("nested square root")
        if m0.denominator != 1:
            raise CapabilityError("square root of a non-integer")
        roots[atom] = QuadExt.sqrt(m0.numerator)
    out = []
    for signs in product((1, -1), repeat=len(ctx.sign_atoms)):
        sval = dict(zip(ctx.sign_atoms, signs))
        acc = [QuadExt(0)] * prec
        for k, c in formal.items():
            factor = QuadExt(1)
            for atom in k:
                factor = factor * (sval[atom] if atom in sval else roots[atom])
            s = _series_of(c, prec)
            try:
                acc = [a + factor * x if x else a for a, x in zip(acc, s.coeffs)]
            except FieldMismatchError as exc:
                raise CapabilityError(f"square roots generate a field of degree > 2 ({exc})") from None
        out.append(acc)
    return out


def sum_value(formal: Formal, ctx: Context, prec: int) -> QSeries:
    """Sum over all conjugates; rational."""
    n = 2 ** (len(ctx.sign_atoms) + (1 if ctx.v_square is not None else 0))
    for k in formal:
        if not k:
            continue
        if any(a in ctx.sign_atoms or a == "v" for a in k):
            continue
        raise UnsupportedEntryError(f"term with atoms {sorted(k)} does not cancel in the conjugate sum")
    base = formal.get(_EMPTY, Fraction(0))
    return _series_of(base, prec).scale(n)


def orbit_charpoly(formal: Formal, ctx: Context, n: int) -> IntPoly:
    """``prod (X - a_n)`` over the four conjugates of an entry with one ``pm`` and ``v``.

    The coefficient must have the shape ``A + e*s*B`` with ``A, B`` in ``Q(v)``.
    """
    if len(ctx.sign_atoms) != 1 or ctx.v_square is None:
        raise UnsupportedEntryError("charpoly needs exactly one pm and one v")
    e = ctx.sign_atoms[0]
    V = ctx.v_square
    if V.denominator != 1:
        raise UnsupportedEntryError("v^2 must be an integer")
    sv = QuadExt.sqrt(V.numerator)
    sq_atoms = {a: (m0, m1) for (m0, m1), a in ctx.sqrt_atoms.items()}
    A = QuadExt(0)
    B = QuadExt(0)
    s_atom = None
    for k, c in formal.items():
        x = _series_of(c, n + 1).coeffs[n]
        if not x:
            continue
        rest = set(k) - {"v"}
        mult = sv if "v" in k else QuadExt(1)
        if not rest:
            A = A + mult * x
        elif len(rest) == 2 and e in rest:
            (a,) = rest - {e}
            if a not in sq_atoms or (s_atom is not None and a != s_atom):
                raise UnsupportedEntryError("unexpected atom combination")
            s_atom = a
            B = B + mult * x
        else:
            raise UnsupportedEntryError(f"unexpected atom combination {sorted(k)}")
    if s_atom is None:
        s2 = QuadExt(0)
    else:
        m0, m1 = sq_atoms[s_atom]
        s2 = QuadExt(m0) + sv * m1
    # (X - A)^2 - s^2 B^2 for one root of v, times its conjugate
    c1 = -2 * A
    c0 = A * A - s2 * B * B
    q = [c0, c1, QuadExt(1)]
    qc = [x.conjugate() for x in q]
    prod_ = [QuadExt(0)] * 5
    for i, x in enumerate(q):
        for j, y in enumerate(qc):
            prod_[i + j] = prod_[i + j] + x * y
    if any(not x.is_rational for x in prod_):
        raise UnsupportedEntryError("conjugate product is not rational")
    return IntPoly.from_rational([x.rat for x in prod_])
