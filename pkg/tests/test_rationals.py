from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mapcomplete.errors import InputError
from mapcomplete.rationals import (
    decimal_approx,
    format_rational,
    frac_ceil,
    nth_positive_rational,
    nth_rational,
    nth_unit_rational,
    parse_rational,
)

rationals = st.fractions(max_denominator=10**6)


def test_parse_basic_forms():
    assert parse_rational("3") == 3
    assert parse_rational("1/2") == Fraction(1, 2)
    assert parse_rational("-7/3") == Fraction(-7, 3)
    assert parse_rational("2/4") == Fraction(1, 2)


@pytest.mark.parametrize("bad", ["0.5", "1e3", "", "1/0", "a", "1 / 2", None, 2])
def test_parse_rejects_inexact_or_malformed(bad):
    with pytest.raises(InputError):
        parse_rational(bad)


@given(rationals)
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_format_lowest_terms():
    assert format_rational(Fraction(2, 4)) == "1/2"
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"


def test_decimal_approx_is_exact_division():
    assert decimal_approx(Fraction(1, 3), 6) == "0.333333"
    assert decimal_approx(Fraction(-1, 8), 4) == "-0.1250"
    assert decimal_approx(Fraction(2), 3) == "2.000"


def test_frac_ceil():
    assert frac_ceil(Fraction(7, 3)) == 3
    assert frac_ceil(Fraction(6, 3)) == 2
    assert frac_ceil(Fraction(-7, 3)) == -2


def test_positive_rational_enumeration_is_injective_and_total():
    seen = {nth_positive_rational(n) for n in range(1, 400)}
    assert len(seen) == 399
    assert all(q > 0 for q in seen)
    # Calkin-Wilf starts 1, 1/2, 2, 1/3, 3/2
    assert [nth_positive_rational(n) for n in range(1, 6)] == [
        Fraction(1),
        Fraction(1, 2),
        Fraction(2),
        Fraction(1, 3),
        Fraction(3, 2),
    ]


def test_rational_enumeration_covers_signs():
    values = [nth_rational(n) for n in range(200)]
    assert len(set(values)) == 200
    assert Fraction(0) in values
    assert any(v < 0 for v in values) and any(v > 0 for v in values)


def test_unit_rational_enumeration_stays_inside():
    values = [nth_unit_rational(n) for n in range(200)]
    assert len(set(values)) == 200
    assert all(0 < v < 1 for v in values)
