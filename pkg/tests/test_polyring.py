from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given

from ncomm.polyring import DimensionError, Poly, as_rational, format_rational, monomials_of_degree

from conftest import polys

X1 = Poly.var(2, 1)
X2 = Poly.var(2, 2)


def test_product_by_hand():
    p = (X1 + X2) * (X1 - X2)
    assert p == Poly(2, {(2, 0): 1, (0, 2): -1})
    assert str(p) == "x1^2 - x2^2"


def test_partials_and_multi_derivative():
    p = Poly(2, {(3, 2): 2, (1, 0): 5})
    assert p.partial(1) == Poly(2, {(2, 2): 6, (0, 0): 5})
    assert p.partial(2) == Poly(2, {(3, 1): 4})
    assert p.derive((2, 1)) == Poly(2, {(1, 1): 24})


def test_integrate_rational_coefficient():
    p = Poly(2, {(0, 2): 1}).integrate(2)
    assert p == Poly(2, {(0, 3): Fraction(1, 3)})
    assert str(p) == "1/3*x2^3"


def test_zero_and_constants():
    assert Poly.zero(2).is_zero()
    assert Poly.const(2, 0).is_zero()
    assert (X1 - X1).is_zero()
    assert Poly.zero(2).total_degree() is None
    assert Poly.const(3, 4).constant_term() == 4


def test_fraction_and_int_coefficients_compare_equal():
    p = Poly.const(1, Fraction(1, 2)) * 2
    assert p == Poly.const(1, 1)
    assert hash(p) == hash(Poly.const(1, 1))
    assert str(p) == "1"


def test_rejects_float_and_mismatched_dimension():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(DimensionError):
        _ = Poly.var(2, 1) + Poly.var(3, 1)


def test_format_rational():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(6, 3)) == "2"


def test_monomials_of_degree_counts():
    # C(n + d - 1, d)
    assert len(monomials_of_degree(2, 3)) == 4
    assert len(monomials_of_degree(3, 2)) == 6


def test_evaluate_and_swap():
    p = Poly(2, {(2, 1): 3, (0, 0): -1})
    assert p.evaluate((2, 5)) == 3 * 4 * 5 - 1
    assert p.substitute_swap(1, 2) == Poly(2, {(1, 2): 3, (0, 0): -1})


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p + (-p) == Poly.zero(2)


@given(polys(), polys())
def test_partial_is_a_derivation(p, q):
    for i in (1, 2):
        assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)


@given(polys())
def test_integrate_inverts_partial(p):
    assert p.integrate(1).partial(1) == p
    assert p.integrate(2).partial(2) == p


@given(polys(), polys())
def test_evaluation_is_a_homomorphism(p, q):
    pt = (Fraction(2, 3), -2)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
