"""Polynomial differential operators Diff(n) and vector fields.

Conventions
-----------
Operators act on functions from the right: ``(f)X`` is written ``apply(X, f)``
and a product acts left factor first, ``(f)(X.Y) = ((f)X)Y``.  With this
convention, on monomial operators::

    u d^a . v d^b = sum_{g <= b} C(b, g) v d^g(u) d^(a+b-g)
    u d^a o v d^b = v d^b(u) d^a                       (the g = b term)
    X . Y = X o Y + X * Y                               (* is ``bullet``)

and ``[X, Y] = X.Y - Y.X`` restricted to vector fields is ``X o Y - Y o X``,
i.e. ``[u d_i, v d_j] = v d_j(u) d_i - u d_i(v) d_j``.

Internally each term is keyed by one integer packing the coefficient exponent
and the derivative multi-index in 16-bit slots, so exponent arithmetic in the
composition loop is a single integer addition.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product as _cartesian
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .polyring import (
    DimensionError,
    Exponent,
    Poly,
    Rational,
    as_rational,
    grlex_key,
    join_signed,
    monomial_text,
)

_BITS = 16
_MASK = (1 << _BITS) - 1
_LIMIT = _MASK


class NotFirstOrder(ValueError):
    """A vector field was required but the operator has other orders."""


class DivergenceError(ValueError):
    """A divergence-free field was required."""


def _pack(a: Exponent, alpha: Exponent) -> int:
    n = len(a)
    k = 0
    for i, e in enumerate(a):
        if e > _LIMIT:
            raise OverflowError("exponent exceeds packed range")
        k |= e << (_BITS * i)
    for i, e in enumerate(alpha):
        if e > _LIMIT:
            raise OverflowError("exponent exceeds packed range")
        k |= e << (_BITS * (n + i))
    return k


def _unpack(key: int, n: int) -> Tuple[Exponent, Exponent]:
    vals = [(key >> (_BITS * i)) & _MASK for i in range(2 * n)]
    return tuple(vals[:n]), tuple(vals[n:])


@lru_cache(maxsize=None)
def _gamma_options(beta: Exponent, skip_zero: bool = False, only_full: bool = False):
    """``(gamma, nonzero entries, packed shift, binom(beta, gamma))`` for gamma <= beta."""
    n = len(beta)
    out = []
    ranges = [range(b + 1) for b in beta]
    for gamma in _cartesian(*ranges):
        if skip_zero and not any(gamma):
            continue
        if only_full and gamma != beta:
            continue
        nz = tuple((i, g) for i, g in enumerate(gamma) if g)
        shift = _pack(gamma, gamma)
        bn = 1
        for b, g in zip(beta, gamma):
            bn *= comb(b, g)
        out.append((gamma, nz, shift, bn))
    return tuple(out)


class DiffOp:
    """A finite sum ``sum_alpha u_alpha d^alpha`` with polynomial coefficients."""

    __slots__ = ("dim", "_t", "_hash")

    def __init__(self, dim: int, terms: Optional[Mapping[Exponent, Poly]] = None):
        """Build from a map ``alpha -> Poly`` (the coefficient of ``d^alpha``)."""
        self.dim = dim
        self._hash = None
        t: Dict[int, Rational] = {}
        for alpha, u in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ValueError(f"bad derivative index {alpha} for dimension {dim}")
            if not isinstance(u, Poly):
                u = Poly.const(dim, u)
            if u.dim != dim:
                raise DimensionError("coefficient has the wrong dimension")
            for e, c in u.items():
                k = _pack(e, alpha)
                v = t.get(k, 0) + c
                if v:
                    t[k] = v
                else:
                    t.pop(k, None)
        self._t = t

    @classmethod
    def _raw(cls, dim: int, t: Dict[int, Rational]) -> "DiffOp":
        obj = cls.__new__(cls)
        obj.dim = dim
        obj._t = t
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "DiffOp":
        return cls._raw(dim, {})

    @classmethod
    def identity(cls, dim: int) -> "DiffOp":
        return cls._raw(dim, {0: 1})

    @classmethod
    def multiplication(cls, u: Poly) -> "DiffOp":
        """The order-zero operator ``f -> u f``."""
        return cls(u.dim, {(0,) * u.dim: u})

    @classmethod
    def d(cls, dim: int, i: int) -> "DiffOp":
        """The derivation ``d_i`` (1-based)."""
        if not 1 <= i <= dim:
            raise IndexError(f"d{i} out of range for dimension {dim}")
        e = [0] * dim
        e[i - 1] = 1
        return cls(dim, {tuple(e): Poly.const(dim, 1)})

    @classmethod
    def monomial(cls, a: Exponent, alpha: Exponent, c=1) -> "DiffOp":
        """``c x^a d^alpha``."""
        a, alpha = tuple(a), tuple(alpha)
        if len(a) != len(alpha):
            raise DimensionError("exponent lengths differ")
        c = as_rational(c)
        return cls._raw(len(a), {_pack(a, alpha): c} if c else {})

    @classmethod
    def vector_field(cls, components: Sequence[Poly]) -> "DiffOp":
        """``sum_i u_i d_i`` from the list of components ``u_1..u_n``."""
        n = len(components)
        terms = {}
        for i, u in enumerate(components):
            if u.dim != n:
                raise DimensionError("component dimension must equal the number of components")
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = u
        return cls(n, terms)

    # -- protocol -----------------------------------------------------
    @property
    def terms(self) -> Dict[Exponent, Poly]:
        """The map ``alpha -> u_alpha``."""
        n = self.dim
        groups: Dict[Exponent, Dict[Exponent, Rational]] = {}
        for k, c in self._t.items():
            a, alpha = _unpack(k, n)
            groups.setdefault(alpha, {})[a] = c
        return {alpha: Poly(n, g, _trusted=True) for alpha, g in groups.items()}

    def flat_terms(self) -> List[Tuple[Exponent, Exponent, Rational]]:
        """``[(coefficient exponent, derivative index, rational), ...]``."""
        n = self.dim
        return [(*_unpack(k, n), c) for k, c in self._t.items()]

    def coefficient(self, alpha: Exponent) -> Poly:
        return self.terms.get(tuple(alpha), Poly.zero(self.dim))

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self) -> int:
        return len(self._t)

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffOp):
            return self.dim == other.dim and self._t == other._t
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._t
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._t.items())))
        return self._hash

    def _check(self, other: "DiffOp") -> None:
        if not isinstance(other, DiffOp):
            raise TypeError(f"expected DiffOp, got {type(other).__name__}")
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    # -- linear structure ---------------------------------------------
    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        a, b = (self._t, other._t) if len(self._t) >= len(other._t) else (other._t, self._t)
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return DiffOp._raw(self.dim, out)

    def __neg__(self) -> "DiffOp":
        return DiffOp._raw(self.dim, {k: -c for k, c in self._t.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                del out[k]
        return DiffOp._raw(self.dim, out)

    def scale(self, c) -> "DiffOp":
        c = as_rational(c)
        if not c:
            return DiffOp.zero(self.dim)
        return DiffOp._raw(self.dim, {k: v * c for k, v in self._t.items()})

    def times_function(self, g: Poly) -> "DiffOp":
        """Multiply every coefficient by ``g``: ``u d^a -> g u d^a``."""
        if g.dim != self.dim:
            raise DimensionError("dimension mismatch")
        n = self.dim
        out: Dict[int, Rational] = {}
        gk = [(_pack(e, (0,) * n), c) for e, c in g.items()]
        for k, c in self._t.items():
            for kg, cg in gk:
                kk = k + kg
                out[kk] = out.get(kk, 0) + c * cg
        return DiffOp._raw(n, {k: v for k, v in out.items() if v})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return compose(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    # -- orders -------------------------------------------------------
    def orders(self) -> List[int]:
        n = self.dim
        return sorted({sum(_unpack(k, n)[1]) for k in self._t})

    def ord_min(self) -> Optional[int]:
        o = self.orders()
        return o[0] if o else None

    def ord_max(self) -> Optional[int]:
        o = self.orders()
        return o[-1] if o else None

    def pr(self, s: int) -> "DiffOp":
        """Keep exactly the terms of differential order ``s``."""
        n = self.dim
        return DiffOp._raw(n, {k: c for k, c in self._t.items() if sum(_unpack(k, n)[1]) == s})

    def is_first_order(self) -> bool:
        n = self.dim
        return all(sum(_unpack(k, n)[1]) == 1 for k in self._t)

    def components(self) -> List[Poly]:
        """``[u_1..u_n]`` for a vector field ``sum u_i d_i``."""
        if not self.is_first_order():
            raise NotFirstOrder(f"not a vector field: {self}")
        n = self.dim
        comps: List[Dict[Exponent, Rational]] = [{} for _ in range(n)]
        for k, c in self._t.items():
            a, alpha = _unpack(k, n)
            comps[alpha.index(1)][a] = c
        return [Poly(n, d, _trusted=True) for d in comps]

    def coefficient_degrees(self) -> List[int]:
        n = self.dim
        return sorted({sum(_unpack(k, n)[0]) for k in self._t})

    def grades(self) -> List[int]:
        """Witt grades ``|a| - |alpha|`` occurring (x^a d_j has grade |a| - 1)."""
        n = self.dim
        out = set()
        for k in self._t:
            a, alpha = _unpack(k, n)
            out.add(sum(a) - sum(alpha))
        return sorted(out)

    def swap_variables(self, i: int = 1, j: int = 2) -> "DiffOp":
        """Image under the automorphism exchanging ``x_i`` and ``x_j``."""
        n = self.dim
        p, q = i - 1, j - 1
        out = {}
        for k, c in self._t.items():
            a, alpha = _unpack(k, n)
            a, alpha = list(a), list(alpha)
            a[p], a[q] = a[q], a[p]
            alpha[p], alpha[q] = alpha[q], alpha[p]
            out[_pack(tuple(a), tuple(alpha))] = c
        return DiffOp._raw(n, out)

    def differentiate_coefficients(self, i: int) -> "DiffOp":
        """``sum d_i(u_alpha) d^alpha``; this is ``[X, d_i]`` up to sign."""
        n = self.dim
        if not 1 <= i <= n:
            raise IndexError(f"d{i} out of range for dimension {n}")
        one = 1 << (_BITS * (i - 1))
        out = {}
        for k, c in self._t.items():
            e = (k >> (_BITS * (i - 1))) & _MASK
            if e:
                out[k - one] = c * e
        return DiffOp._raw(n, out)

    # -- text ---------------------------------------------------------
    def sorted_terms(self):
        flat = self.flat_terms()
        flat.sort(key=lambda t: (grlex_key(t[1]), grlex_key(t[0])))
        return flat

    def __str__(self) -> str:
        pieces = []
        for a, alpha, c in self.sorted_terms():
            mono = "*".join(p for p in (monomial_text(a, "x"), monomial_text(alpha, "d")) if p)
            pieces.append((c, mono))
        return join_signed(pieces)

    def __repr__(self) -> str:
        return f"DiffOp({self.dim}, {str(self)!r})"


# -- products ----------------------------------------------------------

def _check_pair(X: DiffOp, Y: DiffOp) -> int:
    if not isinstance(X, DiffOp) or not isinstance(Y, DiffOp):
        raise TypeError("operands must be DiffOp")
    if X.dim != Y.dim:
        raise DimensionError(f"dimension mismatch: {X.dim} vs {Y.dim}")
    return X.dim


def _product_into(
    out: Dict[int, Rational],
    X: DiffOp,
    Y: DiffOp,
    scale: Rational = 1,
    *,
    skip_zero: bool = False,
    only_full: bool = False,
) -> None:
    """Accumulate ``scale * (X . Y)`` (or its restriction) into ``out``.

    For a Y-term ``v d^b`` and an admissible ``g <= b``, an X-term
    ``c x^a d^alpha`` contributes ``c v C(b,g) a!/(a-g)! x^(a-g) d^(alpha+b-g)``.
    Zero entries may be left behind in ``out``.
    """
    n = X.dim
    xitems = list(X._t.items())
    get = out.get
    for ky, d in Y._t.items():
        beta = _unpack(ky, n)[1]
        for gamma, nz, shift, bn in _gamma_options(beta, skip_zero, only_full):
            base = ky - shift
            w = d * bn * scale
            if not nz:
                for kx, c in xitems:
                    k = kx + base
                    out[k] = get(k, 0) + c * w
            elif len(nz) == 1 and nz[0][1] == 1:
                sh = _BITS * nz[0][0]
                for kx, c in xitems:
                    ai = (kx >> sh) & _MASK
                    if ai:
                        k = kx + base
                        out[k] = get(k, 0) + c * w * ai
            else:
                for kx, c in xitems:
                    f = c * w
                    for i, g in nz:
                        ai = (kx >> (_BITS * i)) & _MASK
                        if ai < g:
                            f = 0
                            break
                        for t in range(g):
                            f *= ai - t
                    if f:
                        k = kx + base
                        out[k] = get(k, 0) + f


def _product(X: DiffOp, Y: DiffOp, *, skip_zero: bool, only_full: bool) -> DiffOp:
    """Shared driver for composition and the right-symmetric product."""
    n = _check_pair(X, Y)
    if not X._t or not Y._t:
        return DiffOp.zero(n)
    out: Dict[int, Rational] = {}
    _product_into(out, X, Y, 1, skip_zero=skip_zero, only_full=only_full)
    return DiffOp._raw(n, {k: v for k, v in out.items() if v})


def compose(X: DiffOp, Y: DiffOp) -> DiffOp:
    """The associative product of Diff(n); ``X`` acts first."""
    return _product(X, Y, skip_zero=False, only_full=False)


def rsym(X: DiffOp, Y: DiffOp) -> DiffOp:
    """Right-symmetric product ``u d^a o v d^b = v d^b(u) d^a``."""
    return _product(X, Y, skip_zero=False, only_full=True)


def bullet(X: DiffOp, Y: DiffOp) -> DiffOp:
    """``u d^a * v d^b = sum_{0 != g <= b} C(b,g) v d^(b-g)(u) d^(a+g)``.

    Written out from the defining sum rather than as ``compose - rsym`` so the
    decomposition ``compose == rsym + bullet`` is a real check.
    """
    n = _check_pair(X, Y)
    out: Dict[Exponent, Poly] = {}
    xterms = X.terms
    for beta, v in Y.terms.items():
        for gamma in _cartesian(*[range(b + 1) for b in beta]):
            if not any(gamma):
                continue
            bn = 1
            for b, g in zip(beta, gamma):
                bn *= comb(b, g)
            rest = tuple(b - g for b, g in zip(beta, gamma))
            for alpha, u in xterms.items():
                piece = (v * u.derive(rest)).scale(bn)
                if piece:
                    key = tuple(a + g for a, g in zip(alpha, gamma))
                    out[key] = out[key] + piece if key in out else piece
    return DiffOp(n, out)


def commutator(X: DiffOp, Y: DiffOp) -> DiffOp:
    return compose(X, Y) - compose(Y, X)


def lie_bracket(X: DiffOp, Y: DiffOp) -> DiffOp:
    """Bracket of two vector fields through the right-symmetric product.

    Equal to :func:`commutator` on vector fields and much cheaper, since the
    second-order parts never get formed.
    """
    return rsym(X, Y) - rsym(Y, X)


def apply(X: DiffOp, f: Poly) -> Poly:
    """``(f)X = sum_alpha u_alpha d^alpha(f)``."""
    if X.dim != f.dim:
        raise DimensionError("dimension mismatch")
    total = Poly.zero(X.dim)
    for alpha, u in X.terms.items():
        total = total + u * f.derive(alpha)
    return total


# -- vector-field helpers ----------------------------------------------

def vfield(*components: Poly) -> DiffOp:
    return DiffOp.vector_field(list(components))


def divergence(X: DiffOp) -> Poly:
    """``Div(sum u_i d_i) = sum d_i(u_i)``."""
    comps = X.components()
    total = Poly.zero(X.dim)
    for i, u in enumerate(comps, start=1):
        total = total + u.partial(i)
    return total


def is_divergence_free(X: DiffOp) -> bool:
    return X.is_first_order() and divergence(X).is_zero()


def d12(u: Poly) -> DiffOp:
    """Hamiltonian field ``d_1(u) d_2 - d_2(u) d_1`` of a potential in two variables."""
    if u.dim != 2:
        raise DimensionError("d12 needs polynomials in exactly two variables")
    return vfield(-u.partial(2), u.partial(1))


def potential(X: DiffOp) -> Poly:
    """Inverse of :func:`d12`, normalized to vanish at the origin."""
    if X.dim != 2:
        raise DimensionError("potential is defined for fields in two variables")
    a, b = X.components()
    if not (a.partial(1) + b.partial(2)).is_zero():
        raise DivergenceError(f"field has nonzero divergence: {X}")
    # d1 u = b, d2 u = -a
    u = b.integrate(1)
    rest = -a - u.partial(2)
    u = u + rest.integrate(2)
    return u - u.constant_term()


def apply_to_field(X: DiffOp, Y: DiffOp) -> DiffOp:
    """Apply ``X`` to each component of the field ``Y``."""
    return DiffOp.vector_field([apply(X, c) for c in Y.components()])


# -- module-level aliases matching the operation names --------------------

def pr(X: DiffOp, s: int) -> DiffOp:
    return X.pr(s)


def ord_min(X: DiffOp) -> Optional[int]:
    return X.ord_min()


def ord_max(X: DiffOp) -> Optional[int]:
    return X.ord_max()


def x(dim: int, i: int) -> Poly:
    return Poly.var(dim, i)


def dd(dim: int, i: int) -> DiffOp:
    return DiffOp.d(dim, i)


def field_from_terms(dim: int, terms: Iterable[Tuple[Rational, Exponent, int]]) -> DiffOp:
    """``sum c x^a d_j`` from ``(c, a, j)`` triples with 1-based ``j``."""
    t: Dict[int, Rational] = {}
    for c, a, j in terms:
        alpha = [0] * dim
        alpha[j - 1] = 1
        k = _pack(tuple(a), tuple(alpha))
        t[k] = t.get(k, 0) + as_rational(c)
    return DiffOp._raw(dim, {k: v for k, v in t.items() if v})
