from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncomm.diffop import DiffOp, DimensionError, commutator, compose, rsym
from ncomm.parse import parse_field, parse_op
from ncomm.skewsum import (
    ArityError,
    EvalStrategy,
    ProductMode,
    adjoint_skewsum,
    cup,
    s_k,
    s_k_naive,
    s_k_rsym_recursive,
    s_k_subset_dp,
    shuffle_sign,
    shuffles,
)

from conftest import fields, operators


def brute(ops, prod=compose):
    """Independent oracle: the alternating sum over itertools.permutations."""
    n = ops[0].dim
    total = DiffOp.zero(n)
    for perm in permutations(range(len(ops))):
        inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
        v = ops[perm[0]]
        for i in perm[1:]:
            v = prod(v, ops[i])
        total = total + (-v if inv % 2 else v)
    return total


def F(*texts):
    return [parse_field(t, 2) for t in texts]


WORKED = F("d1", "d2", "x1*d2", "x1*d1 - x2*d2", "x2^2*d1")


def test_worked_example_all_strategies():
    for strategy in ("naive-permutations", "subset-dp", "cup-split"):
        assert s_k(WORKED, strategy=strategy) == parse_field("6*d1", 2)
    assert s_k_rsym_recursive(WORKED) == parse_field("6*d1", 2)


@pytest.mark.parametrize(
    "texts, value",
    [
        (("d2", "x2*d1", "x1*d1 - x2*d2"), "-2*d1"),
        (("d2", "x2*d1", "x1^2*d1"), "-2*x1*d1"),
        (("d1", "x1*d1 - x2*d2", "x1*d2"), "-2*d2"),
        (("d2", "x1*d1 - x2*d2", "x1^2*d1"), "0"),
        (("d1", "x2*d1", "x1^2*d1"), "0"),
        (("d1", "x1*d1 - x2*d2", "x1^2*d1"), "0"),
        (("d1", "x1*d2", "x1^2*d1"), "2*x1*d2"),
        (("d2", "x1*d2", "x1^2*d1"), "0"),
    ],
)
def test_rsym_s3_values(texts, value):
    ops = F(*texts)
    assert s_k_rsym_recursive(ops) == parse_op(value, 2)
    assert s_k(ops, mode="rsym-left-normed", strategy="naive-permutations") == parse_op(value, 2)


def test_s6_sample_tuple_vanishes():
    ops = F("d1", "d2", "x2*d1", "x1*d1 - x2*d2", "x1*d2", "x1^2*d1")
    assert s_k(ops).is_zero()


def test_small_arities():
    X, Y = F("x1^2*d2", "x2*d1")
    assert s_k([X]) == X
    assert s_k([X, Y]) == commutator(X, Y)
    assert s_k([X, Y], mode="rsym-left-normed") == rsym(X, Y) - rsym(Y, X)


def test_s3_frozen_values():
    # from the permutation oracle
    assert s_k(F("d1", "d2", "x1*d1")) == brute(F("d1", "d2", "x1*d1")) == parse_op("d1*d2", 2)
    assert s_k(F("d1", "d2", "x2*d2")) == parse_op("-d1*d2", 2)


def test_errors():
    with pytest.raises(ArityError):
        s_k([])
    with pytest.raises(DimensionError):
        s_k([parse_field("d1", 2), parse_field("d1", 3)])
    with pytest.raises(ValueError):
        s_k(WORKED, mode="composition", strategy="rsym-recursion")
    with pytest.raises(ValueError):
        s_k(WORKED, mode="rsym-left-normed", strategy="cup-split")
    with pytest.raises(ArityError):
        s_k(WORKED, strategy="cup-split", split=(2, 2))


def test_shuffles_and_signs():
    assert len(shuffles(2, 3)) == 10
    assert shuffle_sign((0, 1), 4) == 1
    assert shuffle_sign((1,), 3) == -1
    assert shuffle_sign((2,), 3) == 1


@given(st.lists(operators(max_terms=2), min_size=1, max_size=5))
def test_strategies_agree_with_oracle(ops):
    want = brute(ops)
    assert s_k_naive(ops) == want
    assert s_k_subset_dp(ops) == want
    if len(ops) >= 2:
        assert s_k(ops, strategy="cup-split") == want


@given(st.lists(fields(), min_size=1, max_size=5))
def test_rsym_strategies_agree_with_oracle(ops):
    want = brute(ops, rsym)
    assert s_k_rsym_recursive(ops) == want
    assert s_k_naive(ops, ProductMode.RSYM) == want


@given(st.lists(operators(max_terms=2), min_size=3, max_size=5), st.data())
def test_every_cup_split_agrees(ops, data):
    a = data.draw(st.integers(1, len(ops) - 1))
    assert s_k(ops, strategy="cup-split", split=(a, len(ops) - a)) == s_k_subset_dp(ops)


@given(st.lists(operators(max_terms=2), min_size=2, max_size=5), st.data())
def test_skew_symmetry(ops, data):
    i = data.draw(st.integers(0, len(ops) - 2))
    swapped = list(ops)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    assert s_k(swapped) == -s_k(ops)
    repeated = list(ops)
    repeated[i + 1] = repeated[i]
    assert s_k(repeated).is_zero()


@given(st.lists(operators(max_terms=2), min_size=3, max_size=4), operators(max_terms=2))
def test_multilinear_in_first_slot(ops, extra):
    lhs = s_k([ops[0] + extra] + ops[1:])
    assert lhs == s_k(ops) + s_k([extra] + ops[1:])


@given(fields(), st.lists(fields(max_terms=2), min_size=1, max_size=4))
def test_adjoint_skewsum_matches_nested_brackets(X0, ops):
    # oracle: sum over orderings of iterated right brackets
    want = DiffOp.zero(2)
    for perm in permutations(range(len(ops))):
        inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
        v = X0
        for i in perm:
            v = commutator(v, ops[i])
        want = want + (-v if inv % 2 else v)
    assert adjoint_skewsum(X0, ops) == want


def test_cup_accepts_list_and_varargs():
    c = cup(2, 3, s_k_subset_dp, s_k_subset_dp)
    assert c(WORKED) == c(*WORKED) == s_k(WORKED)
    with pytest.raises(ArityError):
        c(WORKED[:4])


def test_strategy_enum_values():
    assert {s.value for s in EvalStrategy} == {"naive-permutations", "subset-dp", "rsym-recursion", "cup-split"}


@settings(max_examples=10)
@given(st.lists(fields(max_terms=2), min_size=6, max_size=6))
def test_s6_is_s3_cup_s3(ops):
    assert s_k(ops, strategy="cup-split", split=(3, 3)) == s_k_subset_dp(ops)
