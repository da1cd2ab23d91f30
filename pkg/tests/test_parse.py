from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from ncomm.diffop import DiffOp, d12
from ncomm.parse import Add, Mul, Num, ParseError, Var, parse_expr, parse_field, parse_op, parse_poly
from ncomm.polyring import Poly

from conftest import fields, operators, polys

M = DiffOp.monomial


def test_examples():
    assert parse_field("x1^2*d1 - 2*x1*x2*d2") == M((2, 0), (1, 0)) - M((1, 1), (0, 1), 2)
    assert parse_field("D12(x1*x2)") == M((0, 1), (0, 1)) - M((1, 0), (1, 0))
    assert parse_op("d1*d1") == M((0,), (2,))
    with pytest.raises(ParseError):
        parse_field("d1*d1")


def test_symbol_product_is_normal_ordered():
    assert parse_op("d1*x1") == parse_op("x1*d1") == M((1,), (1,))


def test_rationals_signs_and_parentheses():
    want = Poly(2, {(0, 3): Fraction(-1, 3), (2, 0): 1, (1, 0): -2, (0, 0): 1})
    assert parse_poly("-1/3*x2^3 + (x1 - 1)^2", 2) == want
    assert parse_op("+d2", 2) == M((0, 0), (0, 1))
    assert parse_op("2*(x1 + x2)*d1", 2) == parse_op("2*x1*d1 + 2*x2*d1")


def test_dimension_inference_and_override():
    assert parse_field("x3*d1").dim == 3
    assert parse_field("d1", 4).dim == 4
    assert parse_field("D12(x1)").dim == 2
    with pytest.raises(ParseError):
        parse_field("x3*d1", 2)


def test_ast_shape():
    e = parse_expr("1 + x1*x2")
    assert e == Add(Num(1), Mul(Var(1), Var(2)), 1)


@pytest.mark.parametrize(
    "text, pos",
    [("x1 d1", 3), ("x1/2", 2), ("3*", 2), ("((x1)", 5), ("x0", 0), ("d1^x1", 3), ("", 0), ("x1 $", 3)],
)
def test_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse_op(text)
    assert info.value.pos == pos


def test_semantic_errors():
    with pytest.raises(ParseError):
        parse_op("D12(d1)")
    with pytest.raises(ParseError):
        parse_poly("x1*d1")
    with pytest.raises(ParseError):
        parse_field("x1")
    with pytest.raises(ParseError):
        parse_op("x1^999")


def test_d12_agrees_with_library():
    u = parse_poly("x1^3*x2 - x2^2", 2)
    assert parse_field("D12(x1^3*x2 - x2^2)") == d12(u)


@given(operators(n=3, max_order=3))
def test_operator_roundtrip(X):
    assert parse_op(str(X), X.dim) == X


@given(fields())
def test_field_roundtrip(X):
    assert parse_field(str(X), 2) == X


@given(polys(3, 4, 5))
def test_poly_roundtrip(p):
    assert parse_poly(str(p), 3) == p
