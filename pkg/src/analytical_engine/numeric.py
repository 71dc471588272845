"""Exact rational values for the store, the mill and every oracle.

The value type is :class:`fractions.Fraction`, which already keeps numerator
and denominator coprime with a positive denominator.  This module adds the
engine's error vocabulary and the textual form used by decks and traces.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

__all__ = [
    "Rational",
    "ZeroDenominator",
    "DivisionByZero",
    "make_rational",
    "rat_arith",
    "binomial",
    "is_integer",
    "render",
    "parse_rational",
    "RATIONAL_PATTERN",
]

Rational = Fraction

RATIONAL_PATTERN = r"-?\d+(?:/\d+)?"
_RATIONAL_RE = re.compile(rf"^{RATIONAL_PATTERN}$")


class ZeroDenominator(ZeroDivisionError):
    """A rational was requested with denominator 0."""


class DivisionByZero(ZeroDivisionError):
    """The mill was asked to divide by zero."""


def make_rational(p: int, q: int = 1) -> Fraction:
    if q == 0:
        raise ZeroDenominator(f"{p}/0 has no value")
    return Fraction(p, q)


def _add(a, b):
    return a + b


def _sub(a, b):
    return a - b


def _mul(a, b):
    return a * b


def _div(a, b):
    if b == 0:
        raise DivisionByZero(f"{render(a)} / 0")
    return a / b


_OPS = {"add": _add, "sub": _sub, "mul": _mul, "div": _div}


def rat_arith(op: str, a: Fraction, b: Fraction) -> Fraction:
    """Apply one of the mill's four operations (``add``, ``sub``, ``mul``, ``div``)."""
    try:
        fn = _OPS[op.lower()]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return Fraction(fn(Fraction(a), Fraction(b)))


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


def is_integer(r: Fraction) -> bool:
    return Fraction(r).denominator == 1


def render(r: Fraction) -> str:
    """``-1/30``, ``5/66``, ``41``: denominator omitted when it is 1."""
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`render`; accepts ``[-]digits[/digits]`` only."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    num, _, den = text.partition("/")
    return make_rational(int(num), int(den) if den else 1)
