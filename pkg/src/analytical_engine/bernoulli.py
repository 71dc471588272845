"""Bernoulli numbers by several independent routes.

Every route returns exact :class:`~fractions.Fraction` values.  The modern
table (``B1 = -1/2``) is the single memoized source; the other conventions
are index or sign views onto it.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .numeric import binomial

__all__ = [
    "Convention",
    "InvalidIndex",
    "ArityMismatch",
    "NonIntegerResult",
    "EgfSeries",
    "bernoulli_modern",
    "bernoulli",
    "to_modern_index",
    "eq8_coefficients",
    "eq8_next",
    "eq8_sequence",
    "finite_diff_zero",
    "demorgan_terms",
    "demorgan_bernoulli",
    "egf_coefficients",
    "faulhaber_sum",
]


class Convention(enum.Enum):
    MODERN = "modern"
    SUM_OF_POWERS = "sum-of-powers"
    LOVELACE = "lovelace"


class InvalidIndex(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


class NonIntegerResult(ArithmeticError):
    pass


_memo: list[Fraction] = [Fraction(1)]
_memo_lock = threading.Lock()


def bernoulli_modern(m: int) -> Fraction:
    """B_m with B1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0."""
    if m < 0:
        raise InvalidIndex(f"negative index {m}")
    if m < len(_memo):
        return _memo[m]
    with _memo_lock:
        while len(_memo) <= m:
            k = len(_memo)
            s = sum(binomial(k + 1, j) * _memo[j] for j in range(k))
            _memo.append(-s / (k + 1))
        return _memo[m]


def to_modern_index(conv: Convention, index: int) -> int:
    if conv is Convention.LOVELACE:
        if index < 1 or index % 2 == 0:
            raise InvalidIndex(f"this convention takes odd indices >= 1, got {index}")
        return index + 1
    if index < 0:
        raise InvalidIndex(f"negative index {index}")
    return index


def bernoulli(conv: Convention, index: int) -> Fraction:
    m = to_modern_index(conv, index)
    if conv is Convention.SUM_OF_POWERS and m == 1:
        return Fraction(1, 2)
    return bernoulli_modern(m)


def eq8_coefficients(n: int) -> list[Fraction]:
    """[A_0, A_1, A_3, ..., A_{2n-1}] of the general-form equation for this n.

    A_0 = -(1/2)(2n-1)/(2n+1); A_1 = 2n/2; each later coefficient extends the
    falling product by two factors, (2n-2k+1)(2n-2k) / ((2k+1)(2k+2)).
    The last one is always 1, the coefficient of the unknown.
    """
    if n < 1:
        raise InvalidIndex(f"n must be >= 1, got {n}")
    coeffs = [Fraction(-(2 * n - 1), 2 * (2 * n + 1))]
    a = Fraction(2 * n, 2)
    coeffs.append(a)
    for k in range(1, n):
        a = a * (2 * n - 2 * k + 1) * (2 * n - 2 * k) / ((2 * k + 1) * (2 * k + 2))
        coeffs.append(a)
    return coeffs


def eq8_next(prev: Sequence[Fraction], n: int) -> Fraction:
    """Solve for odd-numbered B_{2n-1} given B_1, B_3, ..., B_{2n-3}."""
    if n < 1:
        raise InvalidIndex(f"n must be >= 1, got {n}")
    if len(prev) != n - 1:
        raise ArityMismatch(f"n={n} needs {n - 1} preceding numbers, got {len(prev)}")
    coeffs = eq8_coefficients(n)
    total = coeffs[0] + sum(b * a for b, a in zip(prev, coeffs[1:]))
    return -total / coeffs[n]


def eq8_sequence(n_max: int) -> list[Fraction]:
    if n_max < 1:
        raise InvalidIndex(f"n_max must be >= 1, got {n_max}")
    out: list[Fraction] = []
    for n in range(1, n_max + 1):
        out.append(eq8_next(out, n))
    return out


def finite_diff_zero(k: int, n: int) -> int:
    """k-th forward difference of x**n at x = 0 (with 0**0 = 1)."""
    return sum((-1) ** (k - j) * binomial(k, j) * j**n for j in range(k + 1))


def demorgan_terms(n: int) -> list[tuple[int, int]]:
    """Bracketed terms as unreduced (signed numerator, denominator) pairs.

    Term k is (-1)^k Δ^k 0^n over 2^(k+1), for k = 0..n; for n = 7 the
    pairs read (0, 2), (-1, 4), (126, 8), (-1806, 16), ...
    """
    return [((-1) ** k * finite_diff_zero(k, n), 2 ** (k + 1)) for k in range(n + 1)]


def demorgan_bernoulli(n: int) -> Fraction:
    """B_{n+1} (modern) directly from differences of powers of zero."""
    if n < 0:
        raise InvalidIndex(f"n must be >= 0, got {n}")
    scale = Fraction(-(n + 1), 2 ** (n + 1) - 1)
    return scale * sum(Fraction(p, q) for p, q in demorgan_terms(n))


@dataclass(frozen=True)
class EgfSeries:
    order: int
    coefficients: tuple[Fraction, ...]

    def bernoulli(self, m: int) -> Fraction:
        return self.coefficients[m] * factorial(m)


def egf_coefficients(order: int) -> EgfSeries:
    """Taylor coefficients of x/(e^x - 1) through x**order.

    Computed as the formal reciprocal of (e^x - 1)/x = sum x^m/(m+1)!.
    """
    if order < 0:
        raise InvalidIndex(f"order must be >= 0, got {order}")
    denom = [Fraction(1, factorial(m + 1)) for m in range(order + 1)]
    c = [Fraction(1)]
    for m in range(1, order + 1):
        c.append(-sum(denom[j] * c[m - j] for j in range(1, m + 1)))
    return EgfSeries(order, tuple(c))


def faulhaber_sum(p: int, x: int) -> int:
    """1**p + 2**p + ... + x**p via Bernoulli numbers (B1 = +1/2)."""
    if p < 0 or x < 0:
        raise ValueError("p and x must be nonnegative")
    total = sum(
        binomial(p + 1, j) * bernoulli(Convention.SUM_OF_POWERS, j) * Fraction(x) ** (p + 1 - j)
        for j in range(p + 1)
    )
    total /= p + 1
    if total.denominator != 1:
        raise NonIntegerResult(f"sum of {p}th powers to {x} came out as {total}")
    return total.numerator
