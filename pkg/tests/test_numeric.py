from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from analytical_engine.numeric import (
    DivisionByZero,
    ZeroDenominator,
    binomial,
    is_integer,
    make_rational,
    parse_rational,
    rat_arith,
    render,
)

fractions = st.fractions(max_denominator=10**6).filter(lambda f: abs(f.numerator) < 10**12)


def test_make_rational_normalizes():
    assert make_rational(6, -4) == Fraction(-3, 2)
    assert make_rational(-6, 4).denominator == 2
    with pytest.raises(ZeroDenominator):
        make_rational(1, 0)


def test_four_operations():
    a, b = Fraction(1, 6), Fraction(-1, 30)
    assert rat_arith("add", a, b) == Fraction(2, 15)
    assert rat_arith("sub", a, b) == Fraction(1, 5)
    assert rat_arith("mul", a, b) == Fraction(-1, 180)
    assert rat_arith("div", a, b) == -5
    with pytest.raises(DivisionByZero):
        rat_arith("div", a, Fraction(0))
    with pytest.raises(ValueError):
        rat_arith("pow", a, b)


def test_render_forms():
    assert render(Fraction(-1, 30)) == "-1/30"
    assert render(Fraction(41)) == "41"
    assert render(Fraction(0)) == "0"


@pytest.mark.parametrize("text", ["", "1/", "/2", "1.5", "+3", "1/-2", "a"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_zero_denominator():
    with pytest.raises(ZeroDenominator):
        parse_rational("3/0")


def test_binomial():
    assert binomial(10, 3) == 120
    assert binomial(3, 5) == 0
    with pytest.raises(ValueError):
        binomial(-1, 0)


@given(st.integers(0, 60), st.integers(1, 60))
def test_pascal_rule(n, k):
    assert binomial(n + 1, k) == binomial(n, k) + binomial(n, k - 1)


@given(fractions)
def test_render_parse_round_trip(r):
    assert parse_rational(render(r)) == r


@given(fractions, fractions)
def test_field_identities(a, b):
    assert rat_arith("sub", rat_arith("add", a, b), b) == a
    if b:
        assert rat_arith("mul", rat_arith("div", a, b), b) == a


@given(st.integers(-10**6, 10**6), st.integers(1, 1000))
def test_is_integer(p, q):
    assert is_integer(Fraction(p, q)) == (p % q == 0)
