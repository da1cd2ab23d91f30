"""Polynomials with Grassmann coefficients and odd derivations.

A :class:`SuperPoly` lives in ``Q[x_1..x_n] (x) Lambda(xi_1..xi_m)``.  Terms are
keyed by ``(even exponent, sorted tuple of odd indices)``; odd generators
anticommute and square to zero.  An odd derivation ``D = sum u_i d_i`` has odd
coefficients ``u_i`` and even partials ``d_i`` that ignore the ``xi``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .polyring import DimensionError, Exponent, Poly, Rational, as_rational, format_rational, monomial_text

OddKey = Tuple[int, ...]
SKey = Tuple[Exponent, OddKey]


def _merge_sign(a: OddKey, b: OddKey) -> int:
    """Sign from sorting the concatenation ``a + b``; 0 if they share a generator."""
    inv = 0
    j = 0
    nb = len(b)
    for x in a:
        # count entries of b smaller than x
        while j < nb and b[j] < x:
            j += 1
        if j < nb and b[j] == x:
            return 0
        inv += j
    return -1 if inv & 1 else 1


class SuperPoly:
    __slots__ = ("n", "m", "_t")

    def __init__(self, n: int, m: int, terms: Optional[Dict[SKey, Rational]] = None):
        self.n = n
        self.m = m
        clean: Dict[SKey, Rational] = {}
        for (e, odd), c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError("even exponent has the wrong length")
            order = sorted(range(len(odd)), key=lambda i: odd[i])
            srt = tuple(odd[i] for i in order)
            if len(set(srt)) != len(srt):
                continue
            if any(not 1 <= g <= m for g in srt):
                raise ValueError("odd generator index out of range")
            sign = _perm_sign(order)
            c = as_rational(c) * sign
            if c:
                v = clean.get((e, srt), 0) + c
                if v:
                    clean[(e, srt)] = v
                else:
                    clean.pop((e, srt), None)
        self._t = clean

    @classmethod
    def _raw(cls, n: int, m: int, t: Dict[SKey, Rational]) -> "SuperPoly":
        obj = cls.__new__(cls)
        obj.n, obj.m, obj._t = n, m, t
        return obj

    @classmethod
    def zero(cls, n: int, m: int) -> "SuperPoly":
        return cls._raw(n, m, {})

    @classmethod
    def xi(cls, n: int, m: int, k: int) -> "SuperPoly":
        if not 1 <= k <= m:
            raise IndexError(f"xi{k} out of range")
        return cls._raw(n, m, {((0,) * n, (k,)): 1})

    @classmethod
    def even(cls, p: Poly, m: int) -> "SuperPoly":
        return cls._raw(p.dim, m, {(e, ()): c for e, c in p.items()})

    @property
    def terms(self) -> Dict[SKey, Rational]:
        return self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperPoly):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self._t == other._t

    def __hash__(self) -> int:
        return hash((self.n, self.m, frozenset(self._t.items())))

    def _check(self, other: "SuperPoly") -> None:
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionError("shape mismatch between super polynomials")

    def parities(self) -> List[int]:
        return sorted({len(odd) & 1 for _e, odd in self._t})

    def is_homogeneous(self) -> bool:
        return len(self.parities()) <= 1

    def parity(self) -> int:
        p = self.parities()
        if len(p) > 1:
            raise ValueError("element is not homogeneous")
        return p[0] if p else 0

    def __add__(self, other: "SuperPoly") -> "SuperPoly":
        self._check(other)
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SuperPoly._raw(self.n, self.m, out)

    def __neg__(self) -> "SuperPoly":
        return SuperPoly._raw(self.n, self.m, {k: -c for k, c in self._t.items()})

    def __sub__(self, other: "SuperPoly") -> "SuperPoly":
        return self + (-other)

    def scale(self, c) -> "SuperPoly":
        c = as_rational(c)
        if not c:
            return SuperPoly.zero(self.n, self.m)
        return SuperPoly._raw(self.n, self.m, {k: v * c for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, SuperPoly):
            return super_mul(self, other)
        return self.scale(other)

    def partial(self, i: int) -> "SuperPoly":
        """Even partial ``d_i``; the odd generators are constants for it."""
        if not 1 <= i <= self.n:
            raise IndexError(f"d{i} out of range")
        k = i - 1
        out = {}
        for (e, odd), c in self._t.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[(ne, odd)] = c * e[k]
        return SuperPoly._raw(self.n, self.m, out)

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for (e, odd), c in sorted(self._t.items(), key=lambda t: (len(t[0][1]), t[0][1], t[0][0])):
            mono = "*".join(p for p in (monomial_text(e), "*".join(f"xi{g}" for g in odd)) if p)
            parts.append((c, mono))
        out = []
        for c, mono in parts:
            neg = c < 0
            mag = -c if neg else c
            body = mono if (mono and mag == 1) else (f"{format_rational(mag)}*{mono}" if mono else format_rational(mag))
            out.append(("-" if neg else "") + body if not out else (" - " if neg else " + ") + body)
        return "".join(out)

    __repr__ = __str__


def _perm_sign(order: Sequence[int]) -> int:
    seen = [False] * len(order)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def super_mul(p: SuperPoly, q: SuperPoly) -> SuperPoly:
    """Product with the Koszul sign from reordering the odd generators."""
    p._check(q)
    out: Dict[SKey, Rational] = {}
    for (e1, o1), c1 in p._t.items():
        for (e2, o2), c2 in q._t.items():
            s = _merge_sign(o1, o2)
            if not s:
                continue
            key = (tuple(a + b for a, b in zip(e1, e2)), tuple(sorted(o1 + o2)))
            out[key] = out.get(key, 0) + s * c1 * c2
    return SuperPoly._raw(p.n, p.m, {k: v for k, v in out.items() if v})


@dataclass(frozen=True)
class OddDerivation:
    """``D = sum_i u_i d_i`` with every ``u_i`` odd."""

    components: Tuple[SuperPoly, ...]

    def __post_init__(self):
        comps = self.components
        if not comps:
            raise ValueError("need at least one component")
        n, m = comps[0].n, comps[0].m
        if len(comps) != n:
            raise DimensionError("one component per even variable is required")
        for u in comps:
            if (u.n, u.m) != (n, m):
                raise DimensionError("components disagree in shape")
            if any(len(odd) % 2 == 0 for _e, odd in u.terms):
                raise ValueError("components of an odd derivation must be odd")

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def m(self) -> int:
        return self.components[0].m


def d_apply(D: OddDerivation, f: SuperPoly) -> SuperPoly:
    """``D(f) = sum_i u_i d_i(f)``."""
    if (f.n, f.m) != (D.n, D.m):
        raise DimensionError("shape mismatch")
    total = SuperPoly.zero(f.n, f.m)
    for i, u in enumerate(D.components, start=1):
        df = f.partial(i)
        if df:
            total = total + super_mul(u, df)
    return total


def d_power(D: OddDerivation, f: SuperPoly, k: int) -> SuperPoly:
    for _ in range(k):
        if f.is_zero():
            break
        f = d_apply(D, f)
    return f


def random_poly(rng: random.Random, n: int, deg: int, terms: int) -> Poly:
    out: Dict[Exponent, int] = {}
    for _ in range(terms):
        d = rng.randint(0, deg)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = out.get(tuple(e), 0) + rng.choice([-3, -2, -1, 1, 2, 3])
    return Poly(n, out)


def random_odd_derivation(rng: random.Random, n: int, m: int, deg: int = 2, terms: int = 2) -> OddDerivation:
    """``u_i = sum_k xi_k p_ik(x)`` with random sparse ``p_ik``."""
    comps = []
    for _ in range(n):
        t: Dict[SKey, Rational] = {}
        for k in range(1, m + 1):
            for e, c in random_poly(rng, n, deg, terms).items():
                t[(e, (k,))] = c
        comps.append(SuperPoly(n, m, t))
    return OddDerivation(tuple(comps))


def nilpotency_samples(n: int, power: int, samples: int, seed: int = 1, m: Optional[int] = None,
                       deg: int = 2, fdeg: Optional[int] = None):
    """Yield ``(D, f, D^power(f))`` on seeded random inputs."""
    rng = random.Random(seed)
    m = n * n + 2 * n if m is None else m
    fdeg = power + 1 if fdeg is None else fdeg
    for _ in range(samples):
        D = random_odd_derivation(rng, n, m, deg)
        f = SuperPoly.even(random_poly(rng, n, fdeg, 4), m)
        yield D, f, d_power(D, f, power)


def check_nilpotency(n: int, power: int, samples: int = 100, seed: int = 1, m: Optional[int] = None,
                     deg: int = 2, expect_zero: bool = True):
    """Report whether ``D^power(f) == 0`` on every sample."""
    from .identities import CheckReport

    start = time.perf_counter()
    count = 0
    witness = None
    for D, f, val in nilpotency_samples(n, power, samples, seed, m, deg):
        count += 1
        if val:
            witness = {
                "D": [str(u) for u in D.components],
                "f": str(f),
                "value": str(val)[:2000],
            }
            break
    zero = witness is None
    return CheckReport(
        name=f"superdiff-n{n}-power{power}",
        passed=zero,
        expected="pass" if expect_zero else "fail",
        samples=count,
        counterexample=witness,
        millis=(time.perf_counter() - start) * 1000,
        seed=seed,
    )
