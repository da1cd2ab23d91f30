"""Root grading of W_n and its divergence-free part, escorts, reconstruction.

The torus ``x_1 d_1, .., x_n d_n`` acts diagonally on ``x^a d_j`` with root
``a - e_j``; the Witt grade is ``|a| - 1``.  A grade-0 invariant map of arity
k only sees argument tuples whose roots add up to ``-e_s`` for some ``s``, and
its values there (the escort) pin the map down completely through

    psi(X_1..X_k) = sum_tuples E_{a_1}(X_1) ... E_{a_k}(X_k) esc(a_1..a_k).

For skew-symmetric maps the table keeps one representative per set of basis
elements and the inner sum over orderings becomes a determinant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as cartesian
from math import comb, factorial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .diffop import DiffOp, field_from_terms
from .formulas import det
from .polyring import DimensionError, Exponent, Poly, Rational, as_rational, monomials_of_degree

Root = Tuple[int, ...]
Term = Tuple[Rational, Exponent, int]  # (coefficient, exponent, direction)


class GradingError(ValueError):
    """A value or argument violated the grading assumptions."""


@dataclass(frozen=True)
class BasisElement:
    """A homogeneous basis vector ``sum c x^a d_j`` sharing one root.

    For W_n this is a single monomial field.  Divergence-free elements are
    combinations inside one root space; ``pivot`` is a term that no other basis
    element of that root space uses, which gives the dual coordinate.
    """

    dim: int
    terms: Tuple[Term, ...]
    pivot: Tuple[Exponent, int]
    divfree: bool = False

    @property
    def field(self) -> DiffOp:
        return field_from_terms(self.dim, self.terms)

    @property
    def root(self) -> Root:
        _, a, j = self.terms[0]
        return tuple(e - (1 if i == j - 1 else 0) for i, e in enumerate(a))

    @property
    def grade(self) -> int:
        return sum(self.terms[0][1]) - 1

    @property
    def pivot_coef(self) -> Rational:
        for c, a, j in self.terms:
            if (a, j) == self.pivot:
                return c
        raise GradingError("pivot is not a term")  # pragma: no cover

    @property
    def label(self) -> str:
        return str(self.field)

    def __str__(self) -> str:
        return self.label


def _w_order(a: Exponent, j: int):
    return (j, tuple(-e for e in a))


def witt_dimension(n: int, s: int) -> int:
    """``dim L_s`` for W_n: n times the number of monomials of degree s+1."""
    if s < -1:
        return 0
    return n * comb(n + s, n - 1)


def _witt_grade(n: int, s: int) -> List[BasisElement]:
    out = []
    for j in range(1, n + 1):
        for a in monomials_of_degree(n, s + 1):
            out.append(BasisElement(n, ((1, a, j),), (a, j)))
    return out


def _divfree_grade(n: int, s: int) -> List[BasisElement]:
    """Kernel of Div on each root space of grade s."""
    by_root: Dict[Root, List[Tuple[Exponent, int]]] = {}
    for b in _witt_grade(n, s):
        by_root.setdefault(b.root, []).append(b.pivot)
    out: List[BasisElement] = []
    for rho, members in by_root.items():
        # Div(x^(rho+e_j) d_j) = (rho_j + 1) x^rho
        weights = {j: rho[j - 1] + 1 for _a, j in members}
        expo = {j: a for a, j in members}
        live = [j for j in sorted(weights) if weights[j]]
        for j in sorted(weights):
            if not weights[j]:
                out.append(BasisElement(n, ((1, expo[j], j),), (expo[j], j), True))
        if len(live) < 2:
            continue
        p = live[0]
        for j in live[1:]:
            vec = {j: weights[p], p: -weights[j]}
            # smallest magnitude coefficient becomes +1, ties to the lower direction
            lead = min(sorted(vec), key=lambda t: abs(vec[t]))
            scale = Fraction(1, vec[lead])
            terms = tuple(
                (as_rational(vec[t] * scale), expo[t], t)
                for t in sorted(vec, key=lambda t: (0 if t == lead else 1, t))
            )
            out.append(BasisElement(n, terms, (expo[j], j), True))
    out.sort(key=lambda b: min(_w_order(a, j) for _c, a, j in b.terms))
    return out


def graded_basis(n: int, s: int, divfree: bool = False) -> List[BasisElement]:
    """Basis of ``L_s`` in W_n, or of its divergence-free part."""
    if s < -1:
        return []
    return _divfree_grade(n, s) if divfree else _witt_grade(n, s)


def e_functional(a: BasisElement, X: DiffOp) -> Poly:
    """Dual coordinate of ``a`` in the Taylor expansion of ``X``.

    For ``a = x^alpha d_i``: ``E_a(v d_j) = delta_ij d^alpha(v) / alpha!``.
    Divergence-free basis elements read off their pivot term.
    """
    if X.dim != a.dim:
        raise DimensionError("dimension mismatch")
    alpha, i = a.pivot
    comp = X.components()[i - 1]
    fact = 1
    for e in alpha:
        fact *= factorial(e)
    val = comp.derive(alpha)
    c = a.pivot_coef * fact
    return val if c == 1 else val / c


# -- supports --------------------------------------------------------------

def _grade_profiles(k: int, total: int = -1) -> Iterator[Tuple[int, ...]]:
    """Nondecreasing grade sequences of length k, entries >= -1, with the given sum."""

    def rec(prefix: List[int], remaining: int, acc: int, lo: int):
        if remaining == 0:
            if acc == total:
                yield tuple(prefix)
            return
        # the rest are >= g, so g * remaining <= total - acc
        g = lo
        while g * remaining <= total - acc:
            prefix.append(g)
            yield from rec(prefix, remaining - 1, acc + g, g)
            prefix.pop()
            g += 1

    yield from rec([], k, 0, -1)


def _root_sum(elems: Sequence[BasisElement]) -> Root:
    n = elems[0].dim
    tot = [0] * n
    for b in elems:
        for i, r in enumerate(b.root):
            tot[i] += r
    return tuple(tot)


def is_escort_root(r: Root) -> bool:
    """True iff ``r = -e_s`` for some s."""
    return sorted(r) == [-1] + [0] * (len(r) - 1)


def is_constant_root(r: Root, order: int) -> bool:
    """True iff ``r = -alpha`` with ``|alpha| = order``: the root of ``d^alpha``."""
    return all(e <= 0 for e in r) and sum(r) == -order


def support_tuples(
    k: int,
    n: int,
    divfree: bool = False,
    skew: bool = True,
    orders: Sequence[int] = (1,),
) -> List[Tuple[BasisElement, ...]]:
    """Basis tuples whose roots sum to ``-alpha`` with ``|alpha|`` in ``orders``.

    The default ``orders=(1,)`` gives the escort support (roots ``-e_s``).  An
    invariant graded map into Diff(n) is determined by its values on the
    tuples for all orders, since those are the constant-coefficient outputs.
    With ``skew`` the entries are distinct and listed once, ordered by grade
    and then basis position; otherwise every ordered tuple is returned.
    """
    if k < 1:
        raise ValueError("arity must be positive")
    bases: Dict[int, List[BasisElement]] = {}
    out: List[Tuple[BasisElement, ...]] = []
    for order in orders:
        for profile in _grade_profiles(k, -order):
            counts: Dict[int, int] = {}
            for g in profile:
                counts[g] = counts.get(g, 0) + 1
            pools = []
            ok = True
            for g in sorted(counts):
                if g not in bases:
                    bases[g] = graded_basis(n, g, divfree)
                if skew:
                    if counts[g] > len(bases[g]):
                        ok = False
                        break
                    pools.append(list(combinations(bases[g], counts[g])))
                else:
                    pools.append(list(cartesian(bases[g], repeat=counts[g])))
            if not ok:
                continue
            for pick in cartesian(*pools):
                elems = tuple(b for group in pick for b in group)
                if is_constant_root(_root_sum(elems), order):
                    if skew:
                        out.append(elems)
                    else:
                        out.extend(_distinct_orderings(elems))
    return out


def _distinct_orderings(elems: Tuple[BasisElement, ...]) -> List[Tuple[BasisElement, ...]]:
    from itertools import permutations

    return sorted(set(permutations(elems)), key=lambda t: [b.label for b in t])


# -- escort tables ---------------------------------------------------------

@dataclass
class EscortTable:
    arity: int
    dim: int
    divfree: bool
    skew: bool = True
    entries: Dict[Tuple[BasisElement, ...], DiffOp] = field(default_factory=dict)
    swept: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, *labels: str) -> DiffOp:
        for key, v in self.entries.items():
            if tuple(b.label for b in key) == labels:
                return v
        return DiffOp.zero(self.dim)

    def value_on(self, fields: Sequence[DiffOp]) -> DiffOp:
        """Table value at basis fields given in any order (skew tables)."""
        fields = list(fields)
        for key, v in self.entries.items():
            kf = [b.field for b in key]
            if len(kf) != len(fields) or any(f not in kf for f in fields):
                continue
            perm = [kf.index(f) for f in fields]
            if len(set(perm)) != len(perm):
                continue
            inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
            return -v if inv & 1 else v
        return DiffOp.zero(self.dim)

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "dim": self.dim,
            "divfree": self.divfree,
            "skew": self.skew,
            "swept": self.swept,
            "entries": [
                {"key": [b.label for b in key], "value": str(v)}
                for key, v in self.entries.items()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict) -> "EscortTable":
        from .parse import parse_field

        n = doc["dim"]
        index: Dict[DiffOp, BasisElement] = {}
        table = cls(doc["arity"], n, doc["divfree"], doc.get("skew", True), swept=doc.get("swept", 0))
        for ent in doc["entries"]:
            key = []
            for lab in ent["key"]:
                fld = parse_field(lab, dim=n)
                if fld not in index:
                    index.update(_basis_index(n, fld, doc["divfree"]))
                if fld not in index:
                    raise GradingError(f"{lab!r} is not a basis element")
                key.append(index[fld])
            table.entries[tuple(key)] = parse_field(ent["value"], dim=n)
        return table

    @classmethod
    def loads(cls, text: str) -> "EscortTable":
        return cls.from_json(json.loads(text))


def _basis_index(n: int, fld: DiffOp, divfree: bool) -> Dict[DiffOp, BasisElement]:
    grades = fld.grades()
    g = grades[0] if grades else -1
    return {b.field: b for b in graded_basis(n, g, divfree)}


def _check_escort_value(v: DiffOp, where) -> None:
    if v.is_zero():
        return
    if not v.is_first_order() or v.coefficient_degrees() != [0]:
        raise GradingError(f"value {v} at {where} is not a constant vector field")


def escort_of(
    psi: Callable[[Sequence[DiffOp]], DiffOp],
    k: int,
    n: int,
    divfree: bool = False,
    skew: bool = True,
) -> EscortTable:
    """Evaluate ``psi`` on every support tuple and keep the nonzero values."""
    table = EscortTable(k, n, divfree, skew)
    for tup in support_tuples(k, n, divfree, skew):
        v = psi([b.field for b in tup])
        table.swept += 1
        _check_escort_value(v, [b.label for b in tup])
        if v:
            table.entries[tup] = v
    return table


def reconstruct(table: EscortTable, *fields: DiffOp) -> DiffOp:
    """Rebuild ``psi(X_1..X_k)`` from its escort."""
    if len(fields) == 1 and isinstance(fields[0], (list, tuple)):
        fields = tuple(fields[0])
    if len(fields) != table.arity:
        raise ValueError(f"table has arity {table.arity}, got {len(fields)} fields")
    for X in fields:
        if X.dim != table.dim:
            raise DimensionError("dimension mismatch")
    total = DiffOp.zero(table.dim)
    memo: Dict[Tuple[int, int], Poly] = {}

    def E(i: int, b: BasisElement) -> Poly:
        key = (i, id(b))
        if key not in memo:
            memo[key] = e_functional(b, fields[i])
        return memo[key]

    k = table.arity
    for key, value in table.entries.items():
        if table.skew:
            M = [[E(i, b) for b in key] for i in range(k)]
            coeff = det(M)
        else:
            coeff = Poly.const(table.dim, 1)
            for i, b in enumerate(key):
                coeff = coeff * E(i, b)
                if not coeff:
                    break
        if coeff:
            total = total + value.times_function(coeff)
    return total


# -- vanishing criterion ------------------------------------------------------

@dataclass(frozen=True)
class BoundResult:
    vanishes: bool
    i0: int
    lhs: int
    rhs: int


def vanishing_bound(dims: Sequence[int], k: int, q: int = -1, r: Optional[int] = None) -> BoundResult:
    """Strict inequality ``k + q < r (i0 + 2) - sum_{i=-1}^{i0} (i0 + 1 - i) dim_i``.

    ``dims[0]`` is ``dim A_{-1}``, ``dims[1]`` is ``dim A_0`` and so on; ``i0``
    is the grade with ``sum_{i<=i0} dim_i <= r < sum_{i<=i0+1} dim_i``.
    """
    if r is None:
        r = k
    if any(d <= 0 for d in dims):
        raise ValueError("dimensions must be positive")
    if r > k:
        raise ValueError("r cannot exceed the arity")
    cumulative = 0
    i0 = None
    for idx, d in enumerate(dims):
        grade = idx - 1
        if cumulative <= r < cumulative + d:
            i0 = grade - 1
            break
        cumulative += d
    if i0 is None:
        raise ValueError(f"r = {r} exceeds the available dimensions {sum(dims)}")
    rhs = r * (i0 + 2) - sum((i0 + 1 - (idx - 1)) * dims[idx] for idx in range(i0 + 2))
    lhs = k + q
    return BoundResult(lhs < rhs, i0, lhs, rhs)


def witt_dims(n: int, top: int) -> List[int]:
    return [witt_dimension(n, s) for s in range(-1, top + 1)]


def divfree_dims(n: int, top: int) -> List[int]:
    return [len(graded_basis(n, s, True)) for s in range(-1, top + 1)]
