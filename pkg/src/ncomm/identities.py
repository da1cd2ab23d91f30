"""Verification checks for identities satisfied by s_k on vector fields.

Every check returns a :class:`CheckReport`.  Checks with ``expected="fail"``
are negative controls: they count as successful when the identity breaks,
and the report carries the counterexample that breaks it.

Sampling is two-stage where it applies.  First comes an exhaustive sweep over
the basis tuples that determine an invariant graded map.  Then seeded random
tuples of sparse fields follow.
"""

from __future__ import annotations

import random
from fractions import Fraction
import time
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations, permutations
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .diffop import DiffOp, _unpack, commutator, compose, divergence, field_from_terms, lie_bracket
from .grading import escort_of, graded_basis, support_tuples
from .polyring import Rational, as_rational
from .skewsum import adjoint_skewsum, s_k, s_k_rsym_recursive, s_k_subset_dp, shuffle_sign

VECT = "vect"
VECT0 = "vect0"


@dataclass(frozen=True)
class SampleSpec:
    """What to sample: dimension, domain, sparsity and the seed."""

    n: int = 2
    domain: str = VECT
    deg: int = 4
    terms: int = 3
    samples: int = 50
    seed: int = 1
    exhaustive: bool = True

    def rng(self, salt: str = "") -> random.Random:
        return random.Random(f"{self.seed}:{salt}")


@dataclass
class CheckReport:
    name: str
    passed: bool
    expected: str = "pass"
    samples: int = 0
    counterexample: Optional[dict] = None
    millis: float = 0.0
    seed: Optional[int] = None
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """True when the outcome matches the expectation."""
        return self.passed == (self.expected == "pass")

    @property
    def status(self) -> str:
        if self.ok:
            return "ok" if self.expected == "pass" else "ok (fails as expected)"
        return "FAILED" if self.expected == "pass" else "UNEXPECTED PASS"

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["ok"] = self.ok
        doc["millis"] = round(self.millis, 3)
        return doc


# -- random inputs ----------------------------------------------------------

_COEFFS = (-3, -2, -1, 1, 2, 3)


def random_field(rng: random.Random, n: int, deg: int, terms: int, domain: str = VECT) -> DiffOp:
    """A sparse random field with 1..terms basis terms of grade <= deg - 1."""
    count = rng.randint(1, terms)
    if domain == VECT0:
        total = DiffOp.zero(n)
        for _ in range(count):
            g = rng.randint(-1, deg - 1)
            b = rng.choice(graded_basis(n, g, True))
            total = total + b.field.scale(rng.choice(_COEFFS))
        return total if total else random_field(rng, n, deg, terms, domain)
    spec = []
    for _ in range(count):
        d = rng.randint(0, deg)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        spec.append((rng.choice(_COEFFS), tuple(e), rng.randint(1, n)))
    X = field_from_terms(n, spec)
    return X if X else random_field(rng, n, deg, terms, domain)


def random_tuples(spec: SampleSpec, k: int, salt: str = "") -> Iterator[List[DiffOp]]:
    rng = spec.rng(f"{salt}:{k}")
    for _ in range(spec.samples):
        yield [random_field(rng, spec.n, spec.deg, spec.terms, spec.domain) for _ in range(k)]


def affine_field(rng: random.Random, n: int) -> DiffOp:
    """A random element of gl_n + C^n."""
    spec = []
    for j in range(1, n + 1):
        spec.append((rng.choice(_COEFFS), (0,) * n, j))
        for i in range(n):
            if rng.random() < 0.5:
                e = [0] * n
                e[i] = 1
                spec.append((rng.choice(_COEFFS), tuple(e), j))
    return field_from_terms(n, spec)


def _text(ops: Sequence[DiffOp]) -> List[str]:
    return [str(X) for X in ops]


def _sweep(spec: SampleSpec, k: int, orders: Sequence[int]) -> List[List[DiffOp]]:
    if not spec.exhaustive:
        return []
    tups = support_tuples(k, spec.n, spec.domain == VECT0, True, orders)
    return [[b.field for b in t] for t in tups]


def _run(
    name: str,
    spec: SampleSpec,
    expected: str,
    cases: Iterable[Tuple[object, ...]],
    test: Callable[..., Tuple[bool, object]],
    details: Optional[dict] = None,
) -> CheckReport:
    """Drive ``test(*case) -> (holds, payload)`` until the first failure."""
    start = time.perf_counter()
    count = 0
    bad = None
    for case in cases:
        count += 1
        holds, payload = test(*case)
        if not holds:
            bad = payload
            break
    return CheckReport(
        name=name,
        passed=bad is None,
        expected=expected,
        samples=count,
        counterexample=bad,
        millis=(time.perf_counter() - start) * 1000,
        seed=spec.seed,
        details=dict(details or {}),
    )


def _higher_part(X: DiffOp) -> DiffOp:
    out = DiffOp.zero(X.dim)
    for s in X.orders():
        if s >= 2:
            out = out + X.pr(s)
    return out


# -- well-definedness and vanishing -----------------------------------------

def check_well_defined(spec: SampleSpec, k: int, expected: str = "pass", name: Optional[str] = None) -> CheckReport:
    """``s_k`` maps vector fields to vector fields: all orders >= 2 cancel."""
    sweep = _sweep(spec, k, range(2, k + 1))

    def test(ops):
        rest = _higher_part(s_k(ops))
        return rest.is_zero(), {"inputs": _text(ops), "value": str(rest)}

    cases = [(t,) for t in sweep] + [(t,) for t in random_tuples(spec, k, "wd")]
    rep = _run(name or f"s{k}-well-defined-{spec.domain}", spec, expected, cases, test)
    rep.details["exhaustive_tuples"] = len(sweep)
    return rep


def check_identity_zero(spec: SampleSpec, k: int, expected: str = "pass", name: Optional[str] = None) -> CheckReport:
    """``s_k = 0`` identically on the domain."""
    sweep = _sweep(spec, k, range(1, k + 1))

    def test(ops):
        v = s_k(ops)
        return v.is_zero(), {"inputs": _text(ops), "value": str(v)}

    cases = [(t,) for t in sweep] + [(t,) for t in random_tuples(spec, k, "zero")]
    rep = _run(name or f"s{k}-zero-{spec.domain}", spec, expected, cases, test)
    rep.details["exhaustive_tuples"] = len(sweep)
    return rep


def check_rsym_equality(spec: SampleSpec, k: int, expected: str = "pass", name: Optional[str] = None) -> CheckReport:
    """Composition and left-normed right-symmetric s_k agree."""
    sweep = _sweep(spec, k, range(1, k + 1))

    def test(ops):
        a = s_k(ops)
        b = s_k_rsym_recursive(ops)
        return a == b, {"inputs": _text(ops), "value": str(a - b)}

    cases = [(t,) for t in sweep] + [(t,) for t in random_tuples(spec, k, "rsym")]
    return _run(name or f"s{k}-rsym-{spec.domain}", spec, expected, cases, test)


# -- derivations --------------------------------------------------------------

def leibniz_defect(X: DiffOp, ops: Sequence[DiffOp], mode: str = "composition") -> DiffOp:
    """``[X, s_k(ops)] - sum_i s_k(.., [X, X_i], ..)``."""
    value = s_k(ops, mode=mode)
    lhs = commutator(X, value) if not value.is_first_order() else lie_bracket(X, value)
    rhs = DiffOp.zero(X.dim)
    for i in range(len(ops)):
        tt = list(ops)
        tt[i] = lie_bracket(X, ops[i])
        rhs = rhs + s_k(tt, mode=mode)
    return lhs - rhs


def check_leibniz(
    spec: SampleSpec,
    k: int,
    source: str = "any-field",
    mode: str = "composition",
    expected: str = "pass",
    name: Optional[str] = None,
    fixed: Optional[DiffOp] = None,
) -> CheckReport:
    """ad X is a derivation of the k-ary operation.

    ``source`` picks X: ``any-field`` (same domain as the tuple), ``affine-fields``
    (gl_n + C^n), or a ``fixed`` field.
    """
    rng = spec.rng(f"leibniz:{source}:{mode}:{k}")

    def cases():
        for ops in random_tuples(spec, k, f"leibniz:{mode}"):
            if fixed is not None:
                X = fixed
            elif source == "affine-fields":
                X = affine_field(rng, spec.n)
            else:
                X = random_field(rng, spec.n, spec.deg, spec.terms, spec.domain)
            yield X, ops

    def test(X, ops):
        d = leibniz_defect(X, ops, mode)
        return d.is_zero(), {"X": str(X), "inputs": _text(ops), "value": str(d)}

    return _run(name or f"s{k}-leibniz-{mode}-{source}", spec, expected, cases(), test)


def check_ad_potential(spec: SampleSpec, name: str = "s5-ad-potential") -> CheckReport:
    """``(X0) s_5(ad X_1..ad X_5) == [X0, s_5(X_1..X_5)]`` on Vect_0(2)."""
    spec = replace(spec, domain=VECT0)
    rng = spec.rng("adpot")

    def cases():
        for ops in random_tuples(spec, 5, "adpot"):
            yield random_field(rng, spec.n, spec.deg, spec.terms, VECT0), ops
        for ops in random_tuples(replace(spec, samples=3), 5, "adpot-in"):
            yield ops[2], ops

    def test(X0, ops):
        lhs = adjoint_skewsum(X0, ops)
        rhs = lie_bracket(X0, s_k(ops))
        return lhs == rhs, {"X0": str(X0), "inputs": _text(ops), "value": str(lhs - rhs)}

    return _run(name, spec, "pass", cases(), test)


def gl2_basis() -> List[DiffOp]:
    M = DiffOp.monomial
    return [M((0, 0), (1, 0)), M((0, 0), (0, 1)), M((1, 0), (1, 0)), M((0, 1), (1, 0)), M((1, 0), (0, 1)), M((0, 1), (0, 1))]


def adjoint_operator_table(ops: Sequence[DiffOp], max_degree: int = 3) -> Dict[str, str]:
    """``X -> (X) s_k(ad ops)`` on every monomial field up to ``max_degree``."""
    from .polyring import monomials_of_degree

    n = ops[0].dim
    out = {}
    for d in range(max_degree + 1):
        for a in monomials_of_degree(n, d):
            for j in range(1, n + 1):
                X = field_from_terms(n, [(1, a, j)])
                out[str(X)] = str(adjoint_skewsum(X, ops))
    return out


def check_ad_obstruction(spec: SampleSpec, name: str = "s6-ad-obstruction") -> CheckReport:
    """``F = s_6(ad gl_2 basis)`` against ``ad s_6(gl_2 basis)``: expected to differ."""
    ops = gl2_basis()
    Y = s_k(ops)
    rng = spec.rng("adobs")
    from .polyring import monomials_of_degree

    mono = [field_from_terms(2, [(1, a, j)]) for d in range(4) for a in monomials_of_degree(2, d) for j in (1, 2)]

    def cases():
        for X in mono:
            yield (X,)
        for _ in range(spec.samples):
            yield (random_field(rng, 2, spec.deg, spec.terms, VECT),)

    def test(X):
        F = adjoint_skewsum(X, ops)
        rhs = lie_bracket(X, Y)
        return F == rhs, {"X0": str(X), "inputs": _text(ops), "F": str(F), "ad": str(rhs)}

    rep = _run(name, spec, "fail", cases(), test)
    rep.details["s6_of_basis"] = str(Y)
    return rep


# -- left commutativity ---------------------------------------------------------

def left_commutator_sum(omega: Callable[[Sequence[DiffOp]], DiffOp], m: int, args: Sequence[DiffOp]) -> DiffOp:
    """``sum_S sign(S) omega(a_S, omega(a_{S^c}, a_{2m+1}))`` over m-subsets S of the first 2m.

    This is the Sym_{2m} alternating sum divided by ``(m!)^2``; the factor is
    harmless for a vanishing test.
    """
    if len(args) != 2 * m + 1:
        raise ValueError(f"need {2 * m + 1} arguments")
    n = args[0].dim
    head, last = list(args[: 2 * m]), args[2 * m]
    inner: Dict[Tuple[int, ...], DiffOp] = {}
    total = DiffOp.zero(n)
    for S in combinations(range(2 * m), m):
        C = tuple(i for i in range(2 * m) if i not in S)
        if C not in inner:
            inner[C] = omega([head[i] for i in C] + [last])
        w = inner[C]
        if w.is_zero():
            continue
        v = omega([head[i] for i in S] + [w])
        total = total + v if shuffle_sign(S, 2 * m) > 0 else total - v
    return total


def homotopical_sum(omega: Callable[[Sequence[DiffOp]], DiffOp], k: int, args: Sequence[DiffOp]) -> DiffOp:
    """``sum_S sign(S) omega(a_S, omega(a_{S^c}))`` over (k-1)-subsets S of 2k - 1 inputs.

    The full alternating sum over Sym_{2k-1} divided by ``(k-1)! k!``.
    """
    N = 2 * k - 1
    if len(args) != N:
        raise ValueError(f"need {N} arguments")
    total = DiffOp.zero(args[0].dim)
    for S in combinations(range(N), k - 1):
        C = [i for i in range(N) if i not in S]
        w = omega([args[i] for i in C])
        if w.is_zero():
            continue
        v = omega([args[i] for i in S] + [w])
        total = total + v if shuffle_sign(S, N) > 0 else total - v
    return total


def check_homotopical(spec: SampleSpec, k: int, name: Optional[str] = None) -> CheckReport:
    """k-homotopical Lie identity; for k = 2 this is the Jacobi identity."""
    omega = _omega(k)

    def test(ops):
        v = homotopical_sum(omega, k, ops)
        return v.is_zero(), {"inputs": _text(ops), "value": str(v)}

    cases = [(t,) for t in random_tuples(spec, 2 * k - 1, "homotopical")]
    return _run(name or f"s{k}-homotopical-lie-{spec.domain}", spec, "pass", cases, test)


def _omega(k: int) -> Callable[[Sequence[DiffOp]], DiffOp]:
    if k == 2:
        return lambda ops: lie_bracket(ops[0], ops[1])
    return s_k_rsym_recursive


def check_left_commutativity(spec: SampleSpec, k: int, name: Optional[str] = None,
                             expected: str = "pass") -> CheckReport:
    """(k-1)-left commutativity of s_k with m = k - 1 and 2m + 1 inputs.

    Uses the right-symmetric s_k, which equals s_k on the domains where the
    claim is made (checked separately by the rsym-equality checks).
    """
    m = k - 1
    omega = _omega(k)

    def test(ops):
        v = left_commutator_sum(omega, m, ops)
        return v.is_zero(), {"inputs": _text(ops), "value": str(v)}

    cases = [(t,) for t in random_tuples(spec, 2 * m + 1, "leftcomm")]
    return _run(name or f"s{k}-{m}-left-commutative-{spec.domain}", spec, expected, cases, test)


# -- coboundaries -----------------------------------------------------------------

def coboundary(psi: Callable[[Sequence[DiffOp]], DiffOp], inputs: Sequence[DiffOp]) -> Tuple[DiffOp, DiffOp, DiffOp]:
    """``(d psi, d' psi, d'' psi)`` at ``inputs`` (k+1 fields, 1-based signs)."""
    n = inputs[0].dim
    N = len(inputs)
    d1 = DiffOp.zero(n)
    for i in range(N):
        for j in range(i + 1, N):
            rest = [inputs[t] for t in range(N) if t != i and t != j]
            v = psi([lie_bracket(inputs[i], inputs[j])] + rest)
            d1 = d1 + v if (i + j) % 2 == 0 else d1 - v
    d2 = DiffOp.zero(n)
    for i in range(N):
        v = lie_bracket(inputs[i], psi(list(inputs[:i]) + list(inputs[i + 1:])))
        d2 = d2 + v if i % 2 == 0 else d2 - v
    return d1 + d2, d1, d2


def check_cocycle(spec: SampleSpec, k: int, combo: str = "d", name: Optional[str] = None) -> CheckReport:
    """``combo`` is ``d`` (d' + d'') or ``2d'+d''``."""

    def test(ops):
        d, d1, d2 = coboundary(lambda t: s_k(t), ops)
        v = d if combo == "d" else d1.scale(2) + d2
        return v.is_zero(), {"inputs": _text(ops), "value": str(v)}

    cases = [(t,) for t in random_tuples(spec, k + 1, f"cocycle:{combo}")]
    return _run(name or f"{combo}-s{k}-{spec.domain}", spec, "pass", cases, test)


def check_dprime_rsym(spec: SampleSpec, k: int, name: Optional[str] = None) -> CheckReport:
    """``d' s_k^rsym`` is 0 for even k and ``-s_{k+1}^rsym`` for odd k."""

    def test(ops):
        _, d1, _ = coboundary(s_k_rsym_recursive, ops)
        target = DiffOp.zero(spec.n) if k % 2 == 0 else -s_k_rsym_recursive(ops)
        return d1 == target, {"inputs": _text(ops), "value": str(d1 - target)}

    cases = [(t,) for t in random_tuples(spec, k + 1, "dprime")]
    return _run(name or f"dprime-rsym-s{k}-{spec.domain}", spec, "pass", cases, test)


# -- primitivity -------------------------------------------------------------------

class TensorDiffOp:
    """Finite sums of ``A (x) B`` in Diff(n) (x) Diff(n), expanded on monomials."""

    __slots__ = ("dim", "_t")

    def __init__(self, dim: int, terms: Optional[Dict[Tuple[int, int], Rational]] = None):
        self.dim = dim
        self._t = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def pure(cls, A: DiffOp, B: DiffOp, c=1) -> "TensorDiffOp":
        c = as_rational(c)
        out: Dict[Tuple[int, int], Rational] = {}
        for ka, va in A._t.items():
            for kb, vb in B._t.items():
                out[(ka, kb)] = out.get((ka, kb), 0) + c * va * vb
        return cls(A.dim, out)

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[Tuple[Rational, DiffOp, DiffOp]]) -> "TensorDiffOp":
        total = cls(dim)
        for c, A, B in pairs:
            total = total + cls.pure(A, B, c)
        return total

    def __add__(self, other: "TensorDiffOp") -> "TensorDiffOp":
        out = dict(self._t)
        for k, v in other._t.items():
            out[k] = out.get(k, 0) + v
        return TensorDiffOp(self.dim, out)

    def __sub__(self, other: "TensorDiffOp") -> "TensorDiffOp":
        return self + other.scale(-1)

    def scale(self, c) -> "TensorDiffOp":
        c = as_rational(c)
        return TensorDiffOp(self.dim, {k: v * c for k, v in self._t.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorDiffOp):
            return NotImplemented
        return self.dim == other.dim and self._t == other._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self) -> int:
        return len(self._t)

    def coefficient(self, A: DiffOp, B: DiffOp) -> Rational:
        """Coefficient of the monomial pair ``A (x) B`` (both single monomials)."""
        if len(A) != 1 or len(B) != 1:
            raise ValueError("coefficient lookup needs monomial operators")
        ka, ca = next(iter(A._t.items()))
        kb, cb = next(iter(B._t.items()))
        return as_rational(Fraction(self._t.get((ka, kb), 0)) / (ca * cb))

    def terms(self) -> List[Tuple[Rational, str, str]]:
        def mono(k: int) -> str:
            return str(DiffOp._raw(self.dim, {k: 1}))

        def key(item):
            (ka, kb), _v = item
            return (_unpack(ka, self.dim)[::-1], _unpack(kb, self.dim)[::-1])

        return [(v, mono(ka), mono(kb)) for (ka, kb), v in sorted(self._t.items(), key=key)]

    def __str__(self) -> str:
        if not self._t:
            return "0"
        out = []
        for c, a, b in self.terms():
            body = f"{a} (x) {b}"
            mag = -c if c < 0 else c
            if mag != 1:
                body = f"{mag}*({body})"
            out.append(("-" if c < 0 else "") + body if not out else (" - " if c < 0 else " + ") + body)
        return "".join(out)

    __repr__ = __str__


def _s_any(ops: Sequence[DiffOp], n: int) -> DiffOp:
    return s_k_subset_dp(list(ops)) if ops else DiffOp.identity(n)


def gaussian_binomial_minus_one(k: int, l: int) -> int:
    """``[k choose l]`` at ``q = -1``."""
    if l < 0 or l > k:
        return 0
    if k % 2 == 0 and l % 2 == 1:
        return 0
    from math import comb

    return comb(k // 2, l // 2)


def primitivity_witness(k: int, ops: Sequence[DiffOp], form: str = "blocks") -> TensorDiffOp:
    """Mixed tensor terms certifying that s_k is not a Lie polynomial.

    ``blocks``: ``sum_{l=1}^{k-1} s_l(X_1..X_l) (x) s_{k-l}(X_{l+1}..X_k)``.
    ``coproduct``: the mixed part of ``Delta(s_k(X_1..X_k))`` with
    ``Delta X = X (x) 1 + 1 (x) X``, i.e.
    ``sum_S [k choose |S|]_{-1} sign(S) s(X_S) (x) s(X_{S^c})``.
    """
    ops = list(ops)
    if len(ops) != k:
        raise ValueError(f"expected {k} operators")
    n = ops[0].dim
    total = TensorDiffOp(n)
    if form == "blocks":
        for l in range(1, k):
            A = _s_any(ops[:l], n)
            if A:
                total = total + TensorDiffOp.pure(A, _s_any(ops[l:], n))
        return total
    if form != "coproduct":
        raise ValueError(f"unknown form {form!r}")
    for l in range(1, k):
        w = gaussian_binomial_minus_one(k, l)
        if not w:
            continue
        for S in combinations(range(k), l):
            C = [i for i in range(k) if i not in S]
            A = _s_any([ops[i] for i in S], n)
            if A:
                total = total + TensorDiffOp.pure(A, _s_any([ops[i] for i in C], n), w * shuffle_sign(S, k))
    return total


def reference_g5() -> Tuple[List[DiffOp], TensorDiffOp]:
    """The quintuple used for G_5 and its expected tensor."""
    M = DiffOp.monomial
    d1, d2 = M((0, 0), (1, 0)), M((0, 0), (0, 1))
    ops = [d1, d2, M((1, 0), (1, 0)) - M((0, 1), (0, 1)), M((0, 1), (1, 0)), M((1, 0), (0, 1))]
    T = TensorDiffOp.from_pairs(2, [
        (-4, d1, d2),
        (-4, d2, d1),
        (-2, d2, M((1, 0), (2, 0))),
        (-4, d2, M((0, 1), (1, 1))),
        (4, M((0, 0), (1, 1)), M((1, 0), (1, 0))),
        (-4, M((0, 0), (1, 1)), M((0, 1), (0, 1))),
        (4, M((1, 0), (1, 0)), M((0, 0), (1, 1))),
        (-2, M((1, 0), (2, 0)), d2),
        (-4, M((0, 1), (0, 1)), M((0, 0), (1, 1))),
        (-4, M((0, 1), (1, 1)), d2),
    ])
    return ops, T


def g6_tuple() -> List[DiffOp]:
    M = DiffOp.monomial
    return [M((0, 0), (1, 0)), M((0, 0), (0, 1)), M((1, 0), (1, 0)), M((0, 1), (1, 0)), M((1, 0), (0, 1)), M((2, 0), (1, 0))]


def check_primitivity(spec: SampleSpec, k: int, name: Optional[str] = None) -> CheckReport:
    """The coproduct mixed term is nonzero on the reference tuple."""
    start = time.perf_counter()
    ops = reference_g5()[0] if k == 5 else g6_tuple()
    G = primitivity_witness(k, ops, "coproduct")
    B = primitivity_witness(k, ops, "blocks")
    details = {"coproduct_terms": len(G), "blocks_terms": len(B), "blocks": str(B)}
    if k == 6:
        M = DiffOp.monomial
        details["blocks_coefficient_d1d2_x1^3d1^2"] = str(B.coefficient(M((0, 0), (1, 1)), M((3, 0), (2, 0))))
    return CheckReport(
        name=name or f"s{k}-primitive",
        passed=not G.is_zero(),
        samples=1,
        counterexample=None if G else {"inputs": _text(ops), "value": "0"},
        millis=(time.perf_counter() - start) * 1000,
        seed=spec.seed,
        details=details,
    )


# -- escort comparisons ------------------------------------------------------------

def _m(a, alpha, c=1) -> DiffOp:
    return DiffOp.monomial(a, alpha, c)


def reference_s5_escort() -> List[Tuple[List[DiffOp], DiffOp]]:
    """Nonzero s_5 values on divergence-free basis tuples, in reference argument order."""
    d1, d2 = _m((0, 0), (1, 0)), _m((0, 0), (0, 1))
    a, c = _m((0, 1), (1, 0)), _m((1, 0), (0, 1))
    b = _m((1, 0), (1, 0)) - _m((0, 1), (0, 1))
    p = _m((2, 0), (1, 0)) - _m((1, 1), (0, 1), 2)
    q = _m((0, 2), (0, 1)) - _m((1, 1), (1, 0), 2)
    return [
        ([d1, d2, a, b, _m((2, 0), (0, 1))], d2.scale(6)),
        ([d1, d2, a, b, p], d1.scale(6)),
        ([d1, d2, a, c, p], d2.scale(-6)),
        ([d1, d2, a, c, q], d1.scale(-6)),
        ([d1, d2, b, c, q], d2.scale(-6)),
        ([d1, d2, b, c, _m((0, 2), (1, 0))], d1.scale(-6)),
    ]


def reference_s6_escort() -> List[Tuple[List[DiffOp], DiffOp]]:
    """Nonzero s_6 values on W_2 basis tuples, in reference argument order."""
    d1, d2 = _m((0, 0), (1, 0)), _m((0, 0), (0, 1))
    x1d1, x2d1, x1d2, x2d2 = _m((1, 0), (1, 0)), _m((0, 1), (1, 0)), _m((1, 0), (0, 1)), _m((0, 1), (0, 1))
    out = []
    for xi in (x1d1, x2d2):
        head = [d1, d2, xi, x2d1, x1d2]
        out += [
            (head + [_m((2, 0), (1, 0))], d2.scale(-2)),
            (head + [_m((1, 1), (1, 0))], d1.scale(2)),
            (head + [_m((1, 1), (0, 1))], d2.scale(2)),
            (head + [_m((0, 2), (0, 1))], d1.scale(-2)),
        ]
    head = [d1, d2, x1d1, x2d1, x2d2]
    out += [
        (head + [_m((2, 0), (1, 0))], d1.scale(-2)),
        (head + [_m((1, 1), (0, 1))], d1.scale(2)),
        (head + [_m((2, 0), (0, 1))], d2.scale(-6)),
    ]
    head = [d1, d2, x1d1, x1d2, x2d2]
    out += [
        (head + [_m((1, 1), (1, 0))], d2.scale(2)),
        (head + [_m((0, 2), (1, 0))], d1.scale(-6)),
        (head + [_m((0, 2), (0, 1))], d2.scale(-2)),
    ]
    return out


def check_escort(spec: SampleSpec, k: int, name: Optional[str] = None) -> CheckReport:
    """Escort of s_k (k=5 on Vect_0(2), k=6 on Vect(2)) equals the reference list."""
    start = time.perf_counter()
    divfree = k == 5
    reference = reference_s5_escort() if k == 5 else reference_s6_escort()
    table = escort_of(lambda t: s_k(t), k, 2, divfree)
    bad = None
    for ops, want in reference:
        got = s_k(ops)
        via_table = table.value_on(ops)
        if got != want or via_table != want:
            bad = {"inputs": _text(ops), "value": str(got), "expected": str(want)}
            break
    if bad is None and len(table) != len(reference):
        bad = {"value": f"{len(table)} nonzero entries", "expected": f"{len(reference)}"}
    return CheckReport(
        name=name or f"s{k}-escort",
        passed=bad is None,
        samples=table.swept,
        counterexample=bad,
        millis=(time.perf_counter() - start) * 1000,
        seed=spec.seed,
        details={"nonzero": len(table), "support": table.swept},
    )


# -- closed formulas -------------------------------------------------------------

def check_closed_formula(spec: SampleSpec, which: str, name: Optional[str] = None) -> CheckReport:
    """Closed formulas against the subset-dp evaluation of s_k.

    ``which`` is one of ``s5``, ``s6``, ``s6-div``, ``pr2-3``, ``pr2-4``, ``pr2-5``.
    """
    from . import formulas
    from .diffop import potential

    def test(ops):
        if which == "s5":
            got = formulas.s5_closed(*[potential(X) for X in ops])
            want = s_k(ops)
        elif which == "s6":
            got, want = formulas.s6_closed(*ops), s_k(ops)
        elif which == "s6-div":
            got, want = formulas.s6_div_decomposition(*ops), s_k(ops)
        else:
            got, want = formulas.pr2_closed(*ops), s_k(ops).pr(2)
        return got == want, {"inputs": _text(ops), "value": str(got), "expected": str(want)}

    k = {"s5": 5, "s6": 6, "s6-div": 6, "pr2-3": 3, "pr2-4": 4, "pr2-5": 5}[which]
    sub = replace(spec, domain=VECT0 if which == "s5" else VECT)
    cases = [(t,) for t in random_tuples(sub, k, f"closed:{which}")]
    return _run(name or f"closed-{which}", sub, "pass", cases, test)


# -- conjecture scan ----------------------------------------------------------------

def conjecture_scan(n: int = 3, k: Optional[int] = None, budget_seconds: float = 600.0,
                    seed: int = 1, confirm: bool = True) -> CheckReport:
    """Look for a support tuple with ``s_k != 0`` (default ``k = n^2 + 2n - 2``).

    Candidates are screened with the right-symmetric recursion and a hit is
    confirmed by the composition subset-dp and by the cup-split evaluation,
    which must both give the same first order value.
    """
    start = time.perf_counter()
    k = n * n + 2 * n - 2 if k is None else k
    tuples = support_tuples(k, n, False, True)
    tried = 0
    witness = None
    exhausted = True
    for tup in tuples:
        if time.perf_counter() - start > budget_seconds:
            exhausted = False
            break
        tried += 1
        ops = [b.field for b in tup]
        v = s_k_rsym_recursive(ops)
        if v:
            witness = (ops, v)
            break
    details: Dict[str, object] = {"k": k, "n": n, "support_size": len(tuples), "tried": tried}
    passed = witness is not None
    counter = None
    if witness:
        ops, v = witness
        details["witness"] = _text(ops)
        details["value"] = str(v)
        if confirm:
            full = s_k_subset_dp(ops)
            split = s_k(ops, strategy="cup-split")
            details["subset_dp_value"] = str(full)
            details["cup_split_value"] = str(split)
            passed = full == v and split == full and full.is_first_order()
    else:
        details["budget_exhausted"] = not exhausted
        counter = {"value": "no nonzero support tuple found"}
    return CheckReport(
        name=f"conjecture-n{n}-k{k}",
        passed=passed,
        samples=tried,
        counterexample=counter,
        millis=(time.perf_counter() - start) * 1000,
        seed=seed,
        details=details,
    )


# -- registry -----------------------------------------------------------------------

@dataclass(frozen=True)
class CheckDef:
    name: str
    run: Callable[[SampleSpec], CheckReport]
    expected: str = "pass"
    description: str = ""
    slow: bool = False


def _with(spec: SampleSpec, **kw) -> SampleSpec:
    return replace(spec, **kw)


def _lean(spec: SampleSpec, deg: int, samples: int) -> SampleSpec:
    return replace(spec, deg=min(spec.deg, deg), samples=min(spec.samples, samples), terms=min(spec.terms, 3))


def _superdiff(spec: SampleSpec, n: int, power: int, expect_zero: bool) -> CheckReport:
    from .superdiff import check_nilpotency

    samples = spec.samples if n > 1 else max(spec.samples, 20)
    return check_nilpotency(n, power, samples=samples, seed=spec.seed, expect_zero=expect_zero)


def _build_registry() -> Dict[str, CheckDef]:
    defs = [
        CheckDef("s5-well-defined", lambda s: check_well_defined(_with(s, domain=VECT0), 5, name="s5-well-defined"),
                 description="s5 maps Vect0(2) to vector fields"),
        CheckDef("s5-well-defined-vect", lambda s: check_well_defined(_with(s, domain=VECT), 5, "fail", "s5-well-defined-vect"),
                 "fail", "s5 on Vect(2) has a second-order part"),
        CheckDef("s6-well-defined", lambda s: check_well_defined(_lean(_with(s, domain=VECT), 3, 50), 6, name="s6-well-defined"),
                 description="s6 maps Vect(2) to vector fields"),
        CheckDef("s6-zero-vect0", lambda s: check_identity_zero(_lean(_with(s, domain=VECT0), 3, 50), 6, name="s6-zero-vect0"),
                 description="s6 = 0 on Vect0(2)"),
        CheckDef("s6-nonzero-vect", lambda s: check_identity_zero(_with(s, domain=VECT), 6, "fail", "s6-nonzero-vect"),
                 "fail", "s6 is not identically zero on Vect(2)"),
        CheckDef("s7-zero", lambda s: check_identity_zero(_lean(_with(s, domain=VECT), 3, 50), 7, name="s7-zero"),
                 description="s7 = 0 on Vect(2)"),
        CheckDef("s8-zero", lambda s: check_identity_zero(_lean(_with(s, domain=VECT), 2, 20), 8, name="s8-zero"),
                 description="s8 = 0 on Vect(2)"),
        CheckDef("s5-rsym", lambda s: check_rsym_equality(_with(s, domain=VECT0), 5, name="s5-rsym"),
                 description="s5 equals its right-symmetric version on Vect0(2)"),
        CheckDef("s5-rsym-vect", lambda s: check_rsym_equality(_with(s, domain=VECT), 5, "fail", "s5-rsym-vect"),
                 "fail", "the equality breaks on Vect(2) through the quadratic part"),
        CheckDef("s6-rsym", lambda s: check_rsym_equality(_lean(_with(s, domain=VECT), 3, 50), 6, name="s6-rsym"),
                 description="s6 equals its right-symmetric version on Vect(2)"),
        CheckDef("s5-leibniz", lambda s: check_leibniz(_lean(_with(s, domain=VECT0), 3, 50), 5, name="s5-leibniz"),
                 description="ad X derives s5 on Vect0(2)"),
        CheckDef("s6-leibniz", lambda s: check_leibniz(_lean(_with(s, domain=VECT), 3, 30), 6, name="s6-leibniz"),
                 description="ad X derives s6 on Vect(2)"),
        CheckDef("rsym-leibniz-affine", lambda s: _merge("rsym-leibniz-affine", [
            check_leibniz(_with(s, domain=VECT), k, "affine-fields", "rsym-left-normed") for k in (3, 4, 5)]),
                 description="affine X derives s3..s5 in the right-symmetric product"),
        CheckDef("rsym4-leibniz-nonaffine", lambda s: check_leibniz(
            _with(s, domain=VECT), 4, "fixed", "rsym-left-normed", "fail", "rsym4-leibniz-nonaffine",
            fixed=DiffOp.monomial((2, 0), (1, 0))),
                 "fail", "X = x1^2 d1 does not derive right-symmetric s4"),
        CheckDef("s5-ad-potential", lambda s: check_ad_potential(_lean(s, 3, 50)),
                 description="s5 of adjoints is ad of s5 on Vect0(2)"),
        CheckDef("s6-ad-obstruction", lambda s: check_ad_obstruction(_lean(s, 3, 10)),
                 "fail", "s6 of gl2 adjoints is not ad of anything"),
        CheckDef("bracket-1-left-commutative", lambda s: check_left_commutativity(
            _with(s, domain=VECT), 2, "bracket-1-left-commutative", "fail"),
                 "fail", "the bracket is not 1-left commutative: the sum is [[a,b],c]"),
        CheckDef("jacobi", lambda s: check_homotopical(_with(s, domain=VECT), 2, "jacobi"),
                 description="2-homotopical Lie identity of the bracket"),
        CheckDef("s5-homotopical-lie", lambda s: check_homotopical(
            _lean(_with(s, domain=VECT0), 2, 20), 5, "s5-homotopical-lie"),
                 description="(Vect0(2), s5) is 5-homotopical Lie"),
        CheckDef("s5-4-left-commutative", lambda s: check_left_commutativity(
            _lean(_with(s, domain=VECT0), 2, 20), 5, "s5-4-left-commutative"),
                 description="(Vect0(2), s5) is 4-left commutative"),
        CheckDef("s6-5-left-commutative", lambda s: check_left_commutativity(
            _lean(_with(s, domain=VECT), 2, 10), 6, "s6-5-left-commutative"),
                 description="(Vect(2), s6) is 5-left commutative"),
        CheckDef("ds5-vect0", lambda s: check_cocycle(_lean(_with(s, domain=VECT0), 3, 20), 5, "d", "ds5-vect0"),
                 description="d s5 = 0 on Vect0(2)"),
        CheckDef("ds6-vect", lambda s: check_cocycle(_lean(_with(s, domain=VECT), 2, 20), 6, "d", "ds6-vect"),
                 description="d s6 = 0 on Vect(2)"),
        CheckDef("s6-2dprime-plus-dsecond", lambda s: check_cocycle(
            _lean(_with(s, domain=VECT), 2, 20), 6, "2d'+d''", "s6-2dprime-plus-dsecond"),
                 description="(2d' + d'') s6 = 0 on Vect(2)"),
        CheckDef("dprime-rsym", lambda s: _merge("dprime-rsym", [
            check_dprime_rsym(_lean(_with(s, domain=VECT), 2, 20), k) for k in (3, 4, 5)]),
                 description="d' s_k^rsym = 0 (k even), -s_(k+1)^rsym (k odd)"),
        CheckDef("s5-primitive", lambda s: check_primitivity(s, 5), description="coproduct mixed term of s5 is nonzero"),
        CheckDef("s6-primitive", lambda s: check_primitivity(s, 6), description="coproduct mixed term of s6 is nonzero"),
        CheckDef("s5-escort", lambda s: check_escort(s, 5), description="escort of s5 on Vect0(2)"),
        CheckDef("s6-escort", lambda s: check_escort(s, 6), description="escort of s6 on Vect(2)"),
        CheckDef("s5-closed", lambda s: check_closed_formula(_lean(s, 4, 50), "s5"), description="-3 D12 of the 5x5 bracket"),
        CheckDef("s6-closed", lambda s: check_closed_formula(_lean(s, 3, 30), "s6"), description="fourteen determinants"),
        CheckDef("s6-div", lambda s: check_closed_formula(_lean(s, 3, 30), "s6-div"), description="divergence expansion of s6"),
        CheckDef("pr2-s3", lambda s: check_closed_formula(s, "pr2-3"), description="quadratic part of s3"),
        CheckDef("pr2-s4", lambda s: check_closed_formula(s, "pr2-4"), description="quadratic part of s4"),
        CheckDef("pr2-s5", lambda s: check_closed_formula(_lean(s, 4, 50), "pr2-5"), description="quadratic part of s5"),
        CheckDef("superdiff-n2", lambda s: _superdiff(s, 2, 7, True), description="D^7 = 0 for odd D in two variables"),
        CheckDef("superdiff-n2-power6", lambda s: _superdiff(_lean(s, 2, 5), 2, 6, False),
                 "fail", "D^6 is not zero"),
        CheckDef("superdiff-n1-power2", lambda s: _superdiff(s, 1, 2, False),
                 "fail", "D^2 is not zero in one variable"),
        CheckDef("superdiff-n1-power3", lambda s: _superdiff(s, 1, 3, True), description="D^3 = 0 in one variable"),
        CheckDef("s15-zero-n3", lambda s: check_identity_zero(
            replace(s, n=3, domain=VECT, deg=2, terms=2, samples=min(s.samples, 3)), 15, name="s15-zero-n3"),
                 description="s15 = 0 on Vect(3)", slow=True),
        CheckDef("conjecture-n3", lambda s: conjecture_scan(3, seed=s.seed), description="s13 != 0 on Vect(3)", slow=True),
    ]
    return {d.name: d for d in defs}


def _merge(name: str, reports: Sequence[CheckReport]) -> CheckReport:
    bad = next((r for r in reports if not r.ok), None)
    return CheckReport(
        name=name,
        passed=bad is None,
        samples=sum(r.samples for r in reports),
        counterexample=None if bad is None else dict(bad.counterexample or {}, part=bad.name),
        millis=sum(r.millis for r in reports),
        seed=reports[0].seed if reports else None,
        details={"parts": [r.name for r in reports]},
    )


REGISTRY: Dict[str, CheckDef] = _build_registry()


def run_check(name: str, spec: Optional[SampleSpec] = None) -> CheckReport:
    if name not in REGISTRY:
        raise KeyError(f"unknown check {name!r}")
    d = REGISTRY[name]
    rep = d.run(spec or SampleSpec())
    rep.name = name
    rep.expected = d.expected
    return rep
