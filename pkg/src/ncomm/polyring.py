"""Sparse multivariate polynomials over the rationals.

A :class:`Poly` is an immutable map from exponent tuples to rational
coefficients in ``dim`` commuting variables ``x1..xn``.  Coefficients are
stored as ``int`` or :class:`fractions.Fraction`; both compare and hash
consistently, so mixing them never breaks canonical equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

Exponent = Tuple[int, ...]
Rational = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live in rings with different numbers of variables."""


def as_rational(c) -> Rational:
    """Coerce ``c`` to an exact rational, keeping integers as ``int``."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return as_rational(Fraction(c))
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not supported")
    # numbers.Rational from elsewhere (e.g. sympy / gmpy)
    return as_rational(Fraction(int(c.numerator), int(c.denominator)))


def format_rational(c: Rational) -> str:
    c = as_rational(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def grlex_key(exp: Exponent):
    """Sort key putting larger total degree first, then lexicographically larger."""
    return (-sum(exp), tuple(-e for e in exp))


def monomial_text(exp: Exponent, symbol: str = "x") -> str:
    parts = []
    for i, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"{symbol}{i}")
        elif e > 1:
            parts.append(f"{symbol}{i}^{e}")
    return "*".join(parts)


def join_signed(pieces: Iterable[Tuple[Rational, str]]) -> str:
    """Render ``[(coef, monomial_text), ...]`` as ``a*m1 - b*m2 + ...``."""
    out = []
    for c, mono in pieces:
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
        else:
            body = format_rational(mag)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


class Poly:
    """Element of Q[x1..xn].  Immutable; never stores zero coefficients."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Optional[Mapping[Exponent, object]] = None, *, _trusted=False):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        self.dim = dim
        self._hash = None
        if _trusted:
            self._terms = terms if terms is not None else {}
            return
        clean: Dict[Exponent, Rational] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for dimension {dim}")
            c = as_rational(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim, {}, _trusted=True)

    @classmethod
    def const(cls, dim: int, c) -> "Poly":
        c = as_rational(c)
        return cls(dim, {(0,) * dim: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, dim: int, i: int) -> "Poly":
        """The coordinate function ``x_i`` (1-based)."""
        if not 1 <= i <= dim:
            raise IndexError(f"variable x{i} out of range for dimension {dim}")
        e = [0] * dim
        e[i - 1] = 1
        return cls(dim, {tuple(e): 1}, _trusted=True)

    @classmethod
    def monomial(cls, exp: Iterable[int], c=1) -> "Poly":
        exp = tuple(exp)
        return cls(len(exp), {exp: c})

    # -- basic protocol -----------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, Rational]:
        return self._terms

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Exponent]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.dim, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def coeff(self, exp: Exponent) -> Rational:
        return self._terms.get(tuple(exp), 0)

    def constant_term(self) -> Rational:
        return self._terms.get((0,) * self.dim, 0)

    def _check(self, other: "Poly") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.dim, other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.dim, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.dim, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Rational] = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly(self.dim, {e: c for e, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = as_rational(c)
        if not c:
            return Poly.zero(self.dim)
        return Poly(self.dim, {e: v * c for e, v in self._terms.items()}, _trusted=True)

    def __truediv__(self, c) -> "Poly":
        c = as_rational(c)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(Fraction(1) / c)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.const(self.dim, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus -----------------------------------------------------
    def partial(self, i: int) -> "Poly":
        """Formal derivative with respect to ``x_i`` (1-based)."""
        if not 1 <= i <= self.dim:
            raise IndexError(f"d{i} out of range for dimension {self.dim}")
        k = i - 1
        out = {}
        for e, c in self._terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return Poly(self.dim, out, _trusted=True)

    def derive(self, alpha: Iterable[int]) -> "Poly":
        """Apply the multi-derivative ``d^alpha``."""
        alpha = tuple(alpha)
        if len(alpha) != self.dim:
            raise DimensionError("derivative multi-index has wrong length")
        out = {}
        for e, c in self._terms.items():
            f = c
            for ei, ai in zip(e, alpha):
                if ai > ei:
                    f = 0
                    break
                for t in range(ai):
                    f *= ei - t
            if f:
                out[tuple(ei - ai for ei, ai in zip(e, alpha))] = f
        return Poly(self.dim, out, _trusted=True)

    def integrate(self, i: int) -> "Poly":
        """Antiderivative in ``x_i`` with no constant of integration."""
        if not 1 <= i <= self.dim:
            raise IndexError(f"x{i} out of range for dimension {self.dim}")
        k = i - 1
        out = {}
        for e, c in self._terms.items():
            ne = e[:k] + (e[k] + 1,) + e[k + 1:]
            out[ne] = as_rational(Fraction(c) / (e[k] + 1))
        return Poly(self.dim, out, _trusted=True)

    def total_degree(self) -> Optional[int]:
        if not self._terms:
            return None
        return max(sum(e) for e in self._terms)

    def homogeneous_part(self, s: int) -> "Poly":
        return Poly(self.dim, {e: c for e, c in self._terms.items() if sum(e) == s}, _trusted=True)

    def evaluate(self, point: Iterable) -> Rational:
        point = [as_rational(p) for p in point]
        total = 0
        for e, c in self._terms.items():
            v = c
            for p, k in zip(point, e):
                v *= p ** k
            total += v
        return as_rational(total)

    def substitute_swap(self, i: int, j: int) -> "Poly":
        """Exchange the variables ``x_i`` and ``x_j``."""
        a, b = i - 1, j - 1

        def sw(e):
            e = list(e)
            e[a], e[b] = e[b], e[a]
            return tuple(e)

        return Poly(self.dim, {sw(e): c for e, c in self._terms.items()}, _trusted=True)

    # -- text ---------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]))

    def __str__(self) -> str:
        return join_signed((c, monomial_text(e)) for e, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {str(self)!r})"


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def partial(p: Poly, i: int) -> Poly:
    return p.partial(i)


def total_degree(p: Poly) -> Optional[int]:
    return p.total_degree()


def monomials_of_degree(n: int, d: int) -> list:
    """All exponent tuples in ``n`` variables of total degree ``d``, grlex-descending."""
    if n == 0:
        return [()] if d == 0 else []
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out
