"""Text syntax for polynomials, differential operators and vector fields.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' nat)*
    atom   := rational | 'x' nat | 'd' nat | 'D12' '(' expr ')' | '(' expr ')'

``*`` is the normal-ordered symbol product: coefficients are written to the
left of derivatives and ``x``'s commute with ``d``'s, so ``x1*d1`` and
``d1*x1`` both denote the monomial operator ``x1 d1``.  This is exactly the
form produced by ``str(DiffOp)``, so rendering and parsing round-trip.
Composition is available as :func:`ncomm.diffop.compose`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .diffop import DiffOp, _unpack, d12
from .polyring import Poly

__all__ = [
    "ParseError",
    "Expr",
    "Num",
    "Var",
    "Deriv",
    "Neg",
    "Add",
    "Mul",
    "Pow",
    "D12",
    "parse_expr",
    "evaluate",
    "parse_op",
    "parse_field",
    "parse_poly",
]


class ParseError(ValueError):
    """Malformed input; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        self.reason = message
        where = f" at position {pos}" if text else ""
        caret = f"\n  {text}\n  {' ' * pos}^" if text else ""
        super().__init__(f"{message}{where}{caret}")


# -- abstract syntax -----------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Deriv:
    index: int


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    sign: int = 1


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class D12:
    arg: "Expr"
    pos: int = 0


Expr = Union[Num, Var, Deriv, Neg, Add, Mul, Pow, D12]


# -- tokenizer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<rat>\d+(?:/\d+)?)|(?P<d12>D12)|(?P<var>x\d+)|(?P<der>d\d+)|(?P<op>[-+*^()]))"
)

Token = Tuple[str, str, int]
MAX_EXPONENT = 255
MAX_DEGREE = 4096


def _tokens(text: str) -> List[Token]:
    out: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.text, tok[2])

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok[1] != value:
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.fail(f"expected {value!r}, got {got}", tok)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        neg = False
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            neg = self.take()[1] == "-"
        e: Expr = self.term()
        if neg:
            e = Neg(e)
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            sign = 1 if self.take()[1] == "+" else -1
            e = Add(e, self.term(), sign)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            e = Mul(e, self.factor())
        return e

    def factor(self) -> Expr:
        e = self.atom()
        while self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            tok = self.take()
            if tok[0] != "rat" or "/" in tok[1]:
                raise self.fail("exponent must be a natural number", tok)
            if int(tok[1]) > MAX_EXPONENT:
                raise self.fail(f"exponent above {MAX_EXPONENT}", tok)
            e = Pow(e, int(tok[1]))
        return e

    def atom(self) -> Expr:
        tok = self.take()
        kind, val, _pos = tok
        if kind == "rat":
            return Num(Fraction(val))
        if kind == "var":
            return Var(self._index(tok))
        if kind == "der":
            return Deriv(self._index(tok))
        if kind == "d12":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return D12(inner, tok[2])
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        got = "end of input" if kind == "end" else repr(val)
        raise self.fail(f"unexpected {got}", tok)

    def _index(self, tok: Token) -> int:
        idx = int(tok[1][1:])
        if idx < 1:
            raise self.fail("indices start at 1", tok)
        if idx >= 1 << 8:
            raise self.fail("index too large", tok)
        return idx


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an :data:`Expr` tree."""
    if not isinstance(text, str):
        raise TypeError("expected a string")
    return _Parser(text).parse()


def max_index(e: Expr) -> int:
    if isinstance(e, (Var, Deriv)):
        return e.index
    if isinstance(e, Num):
        return 0
    if isinstance(e, D12):
        return max(2, max_index(e.arg))
    if isinstance(e, (Neg, Pow)):
        return max_index(e.arg if isinstance(e, Neg) else e.base)
    return max(max_index(e.left), max_index(e.right))


# -- evaluation -------------------------------------------------------------------

def _symbol_mul(X: DiffOp, Y: DiffOp) -> DiffOp:
    """Normal-ordered product: multiply coefficients and derivative monomials."""
    out = {}
    for kx, cx in X._t.items():
        for ky, cy in Y._t.items():
            k = kx + ky
            out[k] = out.get(k, 0) + cx * cy
    return DiffOp._raw(X.dim, {k: v for k, v in out.items() if v})


def evaluate(e: Expr, dim: int, text: str = "") -> DiffOp:
    """Value of ``e`` as an operator in ``dim`` variables."""
    zero = (0,) * dim
    if isinstance(e, Num):
        return DiffOp.monomial(zero, zero, e.value) if e.value else DiffOp.zero(dim)
    if isinstance(e, Var):
        a = [0] * dim
        a[e.index - 1] = 1
        return DiffOp.monomial(tuple(a), zero)
    if isinstance(e, Deriv):
        a = [0] * dim
        a[e.index - 1] = 1
        return DiffOp.monomial(zero, tuple(a))
    if isinstance(e, Neg):
        return -evaluate(e.arg, dim, text)
    if isinstance(e, Add):
        a, b = evaluate(e.left, dim, text), evaluate(e.right, dim, text)
        return a + b if e.sign > 0 else a - b
    if isinstance(e, Mul):
        return _symbol_mul(evaluate(e.left, dim, text), evaluate(e.right, dim, text))
    if isinstance(e, Pow):
        base = evaluate(e.base, dim, text)
        top = max((sum(a) + sum(al) for a, al in (_unpack(k, dim) for k in base._t)), default=0)
        if top * e.exponent > MAX_DEGREE:
            raise ParseError(f"total degree above {MAX_DEGREE}", text, 0)
        out = DiffOp.identity(dim)
        for _ in range(e.exponent):
            out = _symbol_mul(out, base)
        return out
    if isinstance(e, D12):
        inner = evaluate(e.arg, dim, text)
        if any(s != 0 for s in inner.orders()):
            raise ParseError("D12 takes a polynomial argument", text, e.pos)
        return d12(inner.coefficient(zero))
    raise TypeError(f"not an expression node: {e!r}")


def _dim(e: Expr, dim: Optional[int], text: str) -> int:
    need = max(1, max_index(e))
    if dim is None:
        return need
    if dim < need:
        raise ParseError(f"index {need} exceeds dimension {dim}", text, 0)
    return dim


def parse_op(text: str, dim: Optional[int] = None) -> DiffOp:
    """Parse a differential operator; ``dim`` defaults to the largest index used."""
    e = parse_expr(text)
    return evaluate(e, _dim(e, dim, text), text)


def parse_field(text: str, dim: Optional[int] = None) -> DiffOp:
    """Parse a vector field: every term must have exactly one derivative."""
    X = parse_op(text, dim)
    bad = [s for s in X.orders() if s != 1]
    if bad:
        raise ParseError(f"not a vector field: contains terms of order {bad[0]}", text, 0)
    return X


def parse_poly(text: str, dim: Optional[int] = None) -> Poly:
    """Parse a polynomial in ``x1..xn``; derivatives are rejected."""
    X = parse_op(text, dim)
    if any(s != 0 for s in X.orders()):
        raise ParseError("not a polynomial: contains derivatives", text, 0)
    return X.coefficient((0,) * X.dim)
