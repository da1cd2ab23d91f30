"""Evaluation of the standard skew-symmetric polynomial s_k.

``s_k(t_1..t_k) = sum_sigma sign(sigma) t_sigma(1) ... t_sigma(k)`` where the
product is either composition in Diff(n) or the right-symmetric product with
left-normed bracketing ``((t1 o t2) o t3) ...``.

Strategies
----------
naive-permutations
    Depth-first walk over permutations, sharing prefix products.
subset-dp
    ``T(S) = sum_{i in S} (-1)^{#{j in S : j > i}} T(S - i) * X_i``.  Peeling
    the last factor works for any left-normed product, so the same loop serves
    both modes; in rsym mode it is the one-step recursion for s_k^rsym.
rsym-recursion
    The subset recursion with the right-symmetric product.
cup-split
    ``s_{k+l} = s_k cup s_l`` (composition only), from values of s_k and s_l on
    complementary subsets.
"""

from __future__ import annotations

from enum import Enum
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .diffop import DiffOp, DimensionError, _product_into, compose, commutator, lie_bracket, rsym

Product = Callable[[DiffOp, DiffOp], DiffOp]


class ProductMode(str, Enum):
    COMPOSITION = "composition"
    RSYM = "rsym-left-normed"


class EvalStrategy(str, Enum):
    NAIVE = "naive-permutations"
    SUBSET_DP = "subset-dp"
    RSYM_RECURSION = "rsym-recursion"
    CUP_SPLIT = "cup-split"


class ArityError(ValueError):
    """Wrong number of arguments for the requested evaluation."""


def product_for(mode: Union[ProductMode, str]) -> Product:
    mode = ProductMode(mode)
    return compose if mode is ProductMode.COMPOSITION else rsym


def _validate(ops: Sequence[DiffOp]) -> int:
    if len(ops) < 1:
        raise ArityError("s_k needs at least one argument")
    n = ops[0].dim
    for X in ops:
        if not isinstance(X, DiffOp):
            raise TypeError(f"expected DiffOp, got {type(X).__name__}")
        if X.dim != n:
            raise DimensionError("all arguments must share a dimension")
    return n


def shuffle_sign(subset: Sequence[int], total: int) -> int:
    """Sign of the permutation listing ``subset`` (sorted) first, then the rest."""
    inv = sum(s - idx for idx, s in enumerate(sorted(subset)))
    return -1 if inv & 1 else 1


# -- strategies -----------------------------------------------------------

def s_k_naive(ops: Sequence[DiffOp], mode=ProductMode.COMPOSITION) -> DiffOp:
    """Sum over all k! orderings, walking permutations depth first.

    Prefix products are shared along the walk; the final factor of each
    ordering is multiplied straight into one accumulator.
    """
    n = _validate(ops)
    mode = ProductMode(mode)
    prod = product_for(mode)
    only_full = mode is ProductMode.RSYM
    k = len(ops)
    if k == 1:
        return ops[0]
    acc: Dict[int, object] = {}

    def walk(used: int, current: DiffOp, sign: int, depth: int) -> None:
        for i in range(k):
            bit = 1 << i
            if used & bit:
                continue
            # inversions gained: already placed indices larger than i
            inv = bin(used >> (i + 1)).count("1")
            sg = -sign if inv & 1 else sign
            if depth == k - 1:
                _product_into(acc, current, ops[i], sg, only_full=only_full)
                continue
            nxt = ops[i] if depth == 0 else prod(current, ops[i])
            if nxt:
                walk(used | bit, nxt, sg, depth + 1)

    walk(0, DiffOp.zero(n), 1, 0)
    return DiffOp._raw(n, {key: v for key, v in acc.items() if v})


def _sum(items: Sequence[DiffOp], n: int) -> DiffOp:
    total = DiffOp.zero(n)
    for X in items:
        total = total + X
    return total


def _subset_dp(ops: Sequence[DiffOp], prod: Product) -> DiffOp:
    n = _validate(ops)
    k = len(ops)
    layer: Dict[int, DiffOp] = {1 << i: X for i, X in enumerate(ops)}
    for _size in range(2, k + 1):
        nxt: Dict[int, DiffOp] = {}
        acc: Dict[int, List[DiffOp]] = {}
        for S, T in layer.items():
            if T.is_zero():
                continue
            for i in range(k):
                bit = 1 << i
                if S & bit:
                    continue
                # i becomes the last factor; sign counts members above i
                above = bin(S >> (i + 1)).count("1")
                P = prod(T, ops[i])
                if P:
                    acc.setdefault(S | bit, []).append(-P if above & 1 else P)
        for S, parts in acc.items():
            v = _sum(parts, n)
            if v:
                nxt[S] = v
        layer = nxt
    return layer.get((1 << k) - 1, DiffOp.zero(n))


def s_k_subset_dp(ops: Sequence[DiffOp], mode=ProductMode.COMPOSITION) -> DiffOp:
    """Subset dynamic program: about ``2^k k`` products instead of ``k!``."""
    return _subset_dp(ops, product_for(mode))


def s_k_rsym_recursive(ops: Sequence[DiffOp]) -> DiffOp:
    """s_k^rsym by the one-step peeling recursion, memoized over subsets."""
    return _subset_dp(ops, rsym)


def subset_values(ops: Sequence[DiffOp], size: int, evaluator) -> Dict[Tuple[int, ...], DiffOp]:
    """``{S: evaluator([ops[i] for i in S])}`` over all index sets of ``size``."""
    return {S: evaluator([ops[i] for i in S]) for S in combinations(range(len(ops)), size)}


def cup(k: int, l: int, psi, phi, product=ProductMode.COMPOSITION):
    """The shuffle product ``psi cup phi`` of a k-linear and an l-linear map.

    ``(psi cup phi)(a_1..a_{k+l}) = sum over (k,l)-shuffles sigma of
    sign(sigma) psi(a_sigma(1..k)) * phi(a_sigma(k+1..k+l))``.
    Values of ``psi`` and ``phi`` are computed once per subset.
    """
    if k < 1 or l < 1:
        raise ArityError("cup factors need arity at least 1")
    prod = product_for(product) if isinstance(product, (str, ProductMode)) else product

    def combined(*args: DiffOp) -> DiffOp:
        if len(args) == 1 and isinstance(args[0], (list, tuple)):
            args = tuple(args[0])
        if len(args) != k + l:
            raise ArityError(f"expected {k + l} arguments, got {len(args)}")
        n = _validate(args)
        idx = range(k + l)
        left = subset_values(args, k, psi)
        right = subset_values(args, l, phi)
        total = []
        for S, a in left.items():
            if a.is_zero():
                continue
            C = tuple(i for i in idx if i not in S)
            b = right[C]
            if b.is_zero():
                continue
            v = prod(a, b)
            total.append(v if shuffle_sign(S, k + l) > 0 else -v)
        return _sum(total, n)

    return combined


def shuffles(k: int, l: int) -> List[Tuple[int, ...]]:
    """The first-block index sets of all (k,l)-shuffles."""
    return list(combinations(range(k + l), k))


def s_k(
    ops: Sequence[DiffOp],
    mode: Union[ProductMode, str] = ProductMode.COMPOSITION,
    strategy: Union[EvalStrategy, str] = EvalStrategy.SUBSET_DP,
    split: Optional[Tuple[int, int]] = None,
) -> DiffOp:
    """Evaluate s_k on ``ops`` with the chosen product and strategy."""
    mode = ProductMode(mode)
    strategy = EvalStrategy(strategy)
    ops = list(ops)
    _validate(ops)
    if strategy is EvalStrategy.NAIVE:
        return s_k_naive(ops, mode)
    if strategy is EvalStrategy.SUBSET_DP:
        return s_k_subset_dp(ops, mode)
    if strategy is EvalStrategy.RSYM_RECURSION:
        if mode is not ProductMode.RSYM:
            raise ValueError("rsym-recursion evaluates the right-symmetric s_k only")
        return s_k_rsym_recursive(ops)
    if mode is not ProductMode.COMPOSITION:
        raise ValueError("cup-split is valid for composition mode only")
    k = len(ops)
    if split is None:
        split = (k // 2, k - k // 2)
    a, b = split
    if a + b != k or a < 1 or b < 1:
        raise ArityError(f"split {split} does not partition arity {k}")
    return cup(a, b, s_k_subset_dp, s_k_subset_dp)(ops)


def adjoint_skewsum(X0: DiffOp, ops: Sequence[DiffOp]) -> DiffOp:
    """``(X0) s_k(ad X_1..ad X_k)``; ad acts from the right, ``(Y) ad X = [Y, X]``."""
    if not ops:
        return X0
    n = _validate([X0, *ops])
    vector = X0.is_first_order() and all(X.is_first_order() for X in ops)
    br = lie_bracket if vector else commutator
    k = len(ops)
    layer: Dict[int, DiffOp] = {0: X0}
    for _size in range(1, k + 1):
        acc: Dict[int, List[DiffOp]] = {}
        for S, A in layer.items():
            if A.is_zero():
                continue
            for i in range(k):
                bit = 1 << i
                if S & bit:
                    continue
                above = bin(S >> (i + 1)).count("1")
                v = br(A, ops[i])
                if v:
                    acc.setdefault(S | bit, []).append(-v if above & 1 else v)
        layer = {S: _sum(p, n) for S, p in acc.items()}
    return layer.get((1 << k) - 1, DiffOp.zero(n))
