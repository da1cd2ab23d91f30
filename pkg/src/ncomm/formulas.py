"""Closed determinant formulas for 5- and 6-commutators in two variables.

All matrices here are small (at most 6x6) with polynomial entries, so the
determinant is a memoized Laplace expansion over column subsets.

Row specifications
------------------
A row of a "field matrix" is described by a tuple:

``("c", j)``
    the component ``u_{i,j} = (x_j) X_i`` of each field ``X_i``;
``("dc", alpha, j)``
    ``d^alpha u_{i,j}`` for a multi-index ``alpha``;
``("div",)``
    ``Div X_i``.

Column ``i`` always corresponds to the field ``X_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .diffop import DiffOp, d12, divergence
from .polyring import DimensionError, Poly
from .skewsum import s_k_subset_dp

PolyMatrix = List[List[Poly]]
RowSpec = Tuple


def det(M: Sequence[Sequence[Poly]]) -> Poly:
    """Exact determinant by Laplace expansion along rows, memoized on column sets."""
    m = len(M)
    if any(len(row) != m for row in M):
        raise ValueError("matrix is not square")
    if m == 0:
        raise ValueError("empty matrix")
    dim = M[0][0].dim
    memo: Dict[int, Poly] = {}

    def minor(row: int, cols: int) -> Poly:
        # determinant of rows row..m-1 restricted to the column set ``cols``
        if row == m:
            return Poly.const(dim, 1)
        hit = memo.get(cols)
        if hit is not None:
            return hit
        total = Poly.zero(dim)
        sign = 1
        for c in range(m):
            bit = 1 << c
            if not cols & bit:
                continue
            entry = M[row][c]
            if entry:
                sub = minor(row + 1, cols & ~bit)
                if sub:
                    term = entry * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[cols] = total
        return total

    return minor(0, (1 << m) - 1)


def _components(fields: Sequence[DiffOp]) -> List[List[Poly]]:
    out = []
    for X in fields:
        if X.dim != 2:
            raise DimensionError("closed formulas are for two variables")
        out.append(X.components())
    return out


def field_matrix(fields: Sequence[DiffOp], rows: Sequence[RowSpec]) -> PolyMatrix:
    comps = _components(fields)
    mat = []
    for spec in rows:
        kind = spec[0]
        if kind == "c":
            mat.append([c[spec[1] - 1] for c in comps])
        elif kind == "dc":
            alpha, j = spec[1], spec[2]
            mat.append([c[j - 1].derive(alpha) for c in comps])
        elif kind == "div":
            mat.append([c[0].partial(1) + c[1].partial(2) for c in comps])
        else:
            raise ValueError(f"unknown row kind {kind!r}")
    return mat


def _op(alpha: Tuple[int, int], coeff: Poly) -> DiffOp:
    return DiffOp(2, {alpha: coeff})


# -- 5-commutator on divergence-free fields --------------------------------

def bracket5(u1: Poly, u2: Poly, u3: Poly, u4: Poly, u5: Poly) -> Poly:
    """The 5x5 determinant with rows d1, d2, d1^2, d1 d2, d2^2 applied to u1..u5."""
    us = (u1, u2, u3, u4, u5)
    if any(u.dim != 2 for u in us):
        raise DimensionError("bracket5 takes polynomials in two variables")
    rows = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    return det([[u.derive(a) for u in us] for a in rows])


def s5_closed(u1: Poly, u2: Poly, u3: Poly, u4: Poly, u5: Poly) -> DiffOp:
    """``s_5(D12(u1), .., D12(u5)) = -3 D12([u1, .., u5])``."""
    return d12(bracket5(u1, u2, u3, u4, u5)).scale(-3)


# -- 6-commutator on all of Vect(2) -----------------------------------------

@dataclass(frozen=True)
class Block:
    """``weight * det[u_.1; u_.2; rows...] d_direction``."""

    weight: int
    rows: Tuple[RowSpec, ...]
    direction: int

    def top(self) -> Tuple[RowSpec, ...]:
        if self.direction == 1:
            return (("c", 1), ("c", 2))
        return (("c", 2), ("c", 1))

    def evaluate(self, fields: Sequence[DiffOp]) -> Poly:
        return det(field_matrix(fields, self.top() + self.rows)).scale(self.weight)


def _dc(alpha, j) -> RowSpec:
    return ("dc", tuple(alpha), j)


D1, D2, D11, D12_, D22 = (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)

# lower 4x6 parts for the d1 coefficient
S6_D1_BLOCKS: Tuple[Block, ...] = (
    Block(-1, (_dc(D2, 1), _dc(D1, 2), _dc(D2, 2), _dc(D22, 2)), 1),
    Block(-1, (_dc(D1, 1), _dc(D2, 1), _dc(D2, 2), _dc(D11, 1)), 1),
    Block(-1, (_dc(D1, 1), _dc(D2, 1), _dc(D1, 2), _dc(D22, 2)), 1),
    Block(2, (_dc(D2, 1), _dc(D1, 2), _dc(D2, 2), _dc(D12_, 1)), 1),
    Block(2, (_dc(D1, 1), _dc(D2, 1), _dc(D1, 2), _dc(D12_, 1)), 1),
    Block(2, (_dc(D1, 1), _dc(D2, 1), _dc(D2, 2), _dc(D12_, 2)), 1),
    Block(-3, (_dc(D1, 1), _dc(D1, 2), _dc(D2, 2), _dc(D22, 1)), 1),
)


def _swap_row(spec: RowSpec) -> RowSpec:
    if spec[0] == "c":
        return ("c", 3 - spec[1])
    if spec[0] == "dc":
        a = spec[1]
        return ("dc", (a[1], a[0]), 3 - spec[2])
    return spec


def swap_block(b: Block, sign: int = 1) -> Block:
    """Exchange the roles of indices 1 and 2 everywhere in a block.

    The top rows ``(u_.1, u_.2)`` also become ``(u_.2, u_.1)``; this is the
    image of the d1 block under the automorphism ``x1 <-> x2``.
    """
    return Block(sign * b.weight, tuple(_swap_row(r) for r in b.rows), 3 - b.direction)


# Exchanging all indices (top rows included) intertwines s_6 with the x1<->x2
# automorphism, so the swapped blocks keep their weights.  The test suite pins
# this against naive s_6.
S6_D2_SIGN = 1
S6_D2_BLOCKS: Tuple[Block, ...] = tuple(swap_block(b, S6_D2_SIGN) for b in S6_D1_BLOCKS)
S6_BLOCKS: Tuple[Block, ...] = S6_D1_BLOCKS + S6_D2_BLOCKS


def _require_fields(fields: Sequence[DiffOp], k: int) -> None:
    if len(fields) != k:
        raise ValueError(f"expected {k} fields, got {len(fields)}")
    for X in fields:
        if X.dim != 2:
            raise DimensionError("closed formulas are for two variables")
        X.components()  # raises NotFirstOrder


def s6_closed(*fields: DiffOp, blocks: Sequence[Block] = S6_BLOCKS) -> DiffOp:
    """Fourteen-determinant formula for s_6 on Vect(2)."""
    if len(fields) == 1 and isinstance(fields[0], (list, tuple)):
        fields = tuple(fields[0])
    _require_fields(fields, 6)
    parts = [Poly.zero(2), Poly.zero(2)]
    for b in blocks:
        parts[b.direction - 1] = parts[b.direction - 1] + b.evaluate(fields)
    return DiffOp.vector_field(parts)


def _row_text(spec: RowSpec) -> str:
    if spec[0] == "c":
        return f"u_.{spec[1]}"
    if spec[0] == "div":
        return "Div"
    a, j = spec[1], spec[2]
    ds = "".join(f"d{i + 1}" * e for i, e in enumerate(a))
    return f"{ds} u_.{j}"


def render_s6_blocks(blocks: Sequence[Block] = S6_BLOCKS) -> str:
    """Markdown table of the signed blocks actually used by :func:`s6_closed`."""
    lines = [
        "| # | weight | direction | rows 1-2 | rows 3-6 |",
        "|---|--------|-----------|----------|----------|",
    ]
    for i, b in enumerate(blocks, start=1):
        top = ", ".join(_row_text(r) for r in b.top())
        low = ", ".join(_row_text(r) for r in b.rows)
        lines.append(f"| {i} | {b.weight:+d} | d{b.direction} | {top} | {low} |")
    return "\n".join(lines) + "\n"


# -- quadratic parts ------------------------------------------------------

C1, C2, DIV = ("c", 1), ("c", 2), ("div",)

# (weight, lower rows, target d^alpha); the first two rows are always C1, C2
PR2_TERMS: Dict[int, Tuple[Tuple[int, Tuple[RowSpec, ...], Tuple[int, int]], ...]] = {
    3: (
        (-1, (_dc(D2, 1),), D11),
        (1, (_dc(D1, 1),), D12_),
        (-1, (_dc(D2, 2),), D12_),
        (1, (_dc(D1, 2),), D22),
    ),
    4: (
        (-2, (_dc(D1, 1), _dc(D2, 1)), D11),
        (-2, (_dc(D1, 1), _dc(D2, 2)), D12_),
        (-2, (_dc(D1, 2), _dc(D2, 1)), D12_),
        (-2, (_dc(D1, 2), _dc(D2, 2)), D22),
    ),
    5: (
        (-1, (_dc(D1, 1), _dc(D2, 2), _dc(D2, 1)), D11),
        (-1, (DIV, _dc(D2, 1), _dc(D1, 2)), D12_),
        (-1, (_dc(D1, 1), _dc(D2, 2), _dc(D1, 2)), D22),
    ),
}


def pr2_closed(*fields: DiffOp) -> DiffOp:
    """Order-2 part of s_k for k = 3, 4, 5 from its determinant formula."""
    if len(fields) == 1 and isinstance(fields[0], (list, tuple)):
        fields = tuple(fields[0])
    k = len(fields)
    if k not in PR2_TERMS:
        raise ValueError("quadratic-part formulas exist for k = 3, 4, 5")
    _require_fields(fields, k)
    total = DiffOp.zero(2)
    for weight, rows, alpha in PR2_TERMS[k]:
        d = det(field_matrix(fields, (C1, C2) + rows))
        if d:
            total = total + _op(alpha, d.scale(weight))
    return total


def pr2_s3(*fields: DiffOp) -> DiffOp:
    return pr2_closed(*fields)


def pr2_s4(*fields: DiffOp) -> DiffOp:
    return pr2_closed(*fields)


def pr2_s5(*fields: DiffOp) -> DiffOp:
    return pr2_closed(*fields)


# -- divergence decomposition --------------------------------------------

def s6_div_decomposition(*fields: DiffOp, s5=s_k_subset_dp) -> DiffOp:
    """``sum_i (-1)^(i+1) Div(X_i) s_5(X_1..^X_i..X_6)`` with s_5 taken in Diff(2).

    Raises ``ArithmeticError`` if the order-2 parts fail to cancel.
    """
    if len(fields) == 1 and isinstance(fields[0], (list, tuple)):
        fields = tuple(fields[0])
    _require_fields(fields, 6)
    total = DiffOp.zero(2)
    for i, X in enumerate(fields):
        dv = divergence(X)
        if not dv:
            continue
        rest = list(fields[:i]) + list(fields[i + 1:])
        term = s5(rest).times_function(dv)
        total = total + term if i % 2 == 0 else total - term
    if total.pr(2):
        raise ArithmeticError("order-2 parts did not cancel in the alternating sum")
    return total
