"""Grammar for transcribed form expressions.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := postfix ('^' INT)?
    postfix := atom ('sub' '(' INT ')')*
    atom    := INT | NAME | 'v' | 'sqrt' '(' expr ')' | 'pm' '(' expr ')' | '(' expr ')'

Multiplication is always written out.  ``pm(e)`` stands for both ``+e`` and
``-e``; ``v`` is a root of a quadratic relation given with the entry;
``x sub(h)`` means ``x(q^h)``.
"""
from __future__ import annotations

from dataclasses import dataclass
import re


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Sqrt:
    arg: object


@dataclass(frozen=True)
class Pm:
    arg: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Subst:
    arg: object
    h: int


Expr = object

# --- tokens ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        elif m.group(3):
            c = m.group(3)
            if c not in "+-*/^()":
                raise ParseError(f"unknown token {c!r}", start)
            out.append(Token("op", c, start))
        pos = m.end()
    out.append(Token("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.take()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.pos)
        return t

    def at_op(self, *ops) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text in ops

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.postfix()
        if self.at_op("^"):
            self.take()
            t = self.expect("int")
            return Pow(base, int(t.text))
        return base

    def postfix(self):
        node = self.atom()
        while self.peek().kind == "name" and self.peek().text == "sub":
            self.take()
            self.expect("op", "(")
            h = int(self.expect("int").text)
            self.expect("op", ")")
            if h <= 0:
                raise ParseError("substitution exponent must be positive", self.peek().pos)
            node = Subst(node, h)
        return node

    def atom(self):
        t = self.take()
        if t.kind == "int":
            return Num(int(t.text))
        if t.kind == "name":
            if t.text in ("sqrt", "pm"):
                self.expect("op", "(")
                inner = self.expr()
                self.expect("op", ")")
                return Sqrt(inner) if t.text == "sqrt" else Pm(inner)
            if t.text == "v":
                return Var()
            if t.text == "sub":
                raise ParseError("'sub' must follow an operand", t.pos)
            return Sym(t.text)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            self.expect("op", ")")
            return inner
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"unexpected {t.text!r}", t.pos)
    return node


# --- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e``."""
    return _fmt(e, 0)


def _fmt(e, ctx: int) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Var):
        return "v"
    if isinstance(e, Sqrt):
        return f"sqrt({_fmt(e.arg, 0)})"
    if isinstance(e, Pm):
        return f"pm({_fmt(e.arg, 0)})"
    if isinstance(e, Subst):
        return f"{_fmt(e.arg, 6)} sub({e.h})"
    if isinstance(e, Pow):
        # '^' does not chain, so a power inside a power or a substitution is bracketed
        s = f"{_fmt(e.base, 6)}^{e.exp}"
        return f"({s})" if ctx > 5 else s
    if isinstance(e, Neg):
        s = "-" + _fmt(e.arg, 3)
        return f"({s})" if ctx > 3 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        # left-associative: the right operand needs parentheses at equal precedence
        s = f"{_fmt(e.left, p)}{e.op}{_fmt(e.right, p + 1)}"
        return f"({s})" if ctx > p else s
    raise TypeError(f"not an expression node: {e!r}")


def walk(e: Expr):
    yield e
    for child in children(e):
        yield from walk(child)


def children(e: Expr) -> tuple:
    if isinstance(e, (Sqrt, Pm, Neg)):
        return (e.arg,)
    if isinstance(e, Subst):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    return ()


def symbols(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Sym)}


def count_markers(e: Expr) -> tuple[int, int]:
    """Number of ``pm`` nodes and whether ``v`` occurs (0 or 1)."""
    pms = sum(1 for n in walk(e) if isinstance(n, Pm))
    has_v = any(isinstance(n, Var) for n in walk(e))
    return pms, int(has_v)
