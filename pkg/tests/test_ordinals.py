import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.errors import OrdinalOverflowError, OrdinalRangeError, OrdinalSyntaxError
from core.ordinals import (
    OMEGA,
    ONE,
    ZERO,
    Comparison,
    Ordinal,
    compare,
    format_ordinal,
    interval_type,
    ordinal_sum,
    parse,
    trunc_tilde,
)

from helpers import o

ordinals = st.lists(st.integers(min_value=0, max_value=6), max_size=4).map(lambda c: Ordinal(tuple(c)))


def test_parse_and_format():
    assert parse("w^2*3+w+5") == o(3, 1, 5)
    assert parse("ω^2 + 1") == o(1, 0, 1)
    assert parse("0") == ZERO
    assert parse("7") == Ordinal.of(7)
    assert format_ordinal(o(3, 1, 5)) == "w^2*3+w+5"
    assert format_ordinal(o(2, 0)) == "w*2"
    assert format_ordinal(ZERO) == "0"


@pytest.mark.parametrize("text", ["", "w+w^2", "w*0", "w^2+w^2", "x", "w^"])
def test_parse_rejects_bad_literals(text):
    with pytest.raises(OrdinalSyntaxError):
        parse(text)


def test_overflow():
    with pytest.raises(OrdinalOverflowError):
        parse("w^65")
    with pytest.raises(OrdinalOverflowError):
        Ordinal((2**63,))
    with pytest.raises(OrdinalOverflowError):
        Ordinal.of(2**63 - 1) + Ordinal.of(1)


def test_canonical_form_strips_trailing_zeros():
    assert Ordinal((1, 0, 0)) == ONE
    assert Ordinal((0, 0)).is_zero()


def test_addition_absorbs_smaller_terms():
    assert ONE + OMEGA == OMEGA
    assert OMEGA + ONE != OMEGA
    assert o(1, 5) + o(2, 0) == o(3, 0)
    assert o(1, 0, 4) + o(1, 1) == o(1, 1, 1)


def test_compare():
    assert compare(ONE, OMEGA) is Comparison.LT
    assert compare(OMEGA, OMEGA) is Comparison.EQ
    assert compare(o(1, 0, 0), o(9, 9)) is Comparison.GT


def test_interval_type():
    assert interval_type(ONE, OMEGA) == OMEGA
    assert interval_type(OMEGA, o(2, 0)) == OMEGA
    assert interval_type(o(1, 3), o(1, 0, 0)) == o(1, 0, 0)
    assert interval_type(OMEGA, OMEGA) == ZERO
    with pytest.raises(OrdinalRangeError):
        interval_type(OMEGA, ONE)


def test_trunc_tilde():
    head, tail = trunc_tilde(o(3, 1, 5), 1)
    assert head == o(3, 0, 0)
    assert tail == (1, 5)
    assert trunc_tilde(o(1, 2), 4) == (ZERO, (0, 0, 0, 1, 2))


def test_limit_and_successor():
    assert OMEGA.is_limit()
    assert not ONE.is_limit()
    assert not ZERO.is_limit()
    assert OMEGA.successor() == o(1, 1)
    assert Ordinal.of(2).omega_times(3) == Ordinal.omega(3, 2)


@given(ordinals, ordinals, ordinals)
def test_addition_is_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(ordinals, ordinals)
def test_interval_type_inverts_addition(a, b):
    assert interval_type(a, a + b) == b


@given(ordinals, ordinals, ordinals)
def test_left_cancellation(a, b, c):
    if a + b == a + c:
        assert b == c


@given(ordinals, ordinals)
def test_order_is_total_and_compatible_with_addition(a, b):
    assert (a < b) + (a == b) + (b < a) == 1
    assert a <= a + b
    assert b <= a + b


@given(ordinals)
def test_format_parse_round_trip(a):
    assert parse(format_ordinal(a)) == a


@given(st.lists(ordinals, max_size=4))
def test_ordinal_sum_folds_left(parts):
    total = ZERO
    for p in parts:
        total = total + p
    assert ordinal_sum(parts) == total
