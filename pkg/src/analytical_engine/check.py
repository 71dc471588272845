"""Self-check suites: every oracle against every other, and the shipped decks against the oracles."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .bernoulli import (
    bernoulli_modern,
    demorgan_bernoulli,
    demorgan_terms,
    egf_coefficients,
    eq8_next,
    eq8_sequence,
    faulhaber_sum,
    finite_diff_zero,
)
from .deck import Deck, Op, parse_deck
from .mill import StepDivisionByZero
from .programs import (
    EMBEDDED,
    LinearSystem2x2,
    embedded_text,
    is_prime_trial,
    run_note_d,
    run_note_g_cycle,
    run_note_g_full,
    run_primes,
    solve_2x2_reference,
)

__all__ = ["SuiteResult", "SUITES", "run_check", "format_report", "BERNOULLI_31_DIGITS"]

BERNOULLI_31_DIGITS = 91409924241424243424241924242500
NOTE_D_SEED = 1843


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


class Mismatch(AssertionError):
    pass


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise Mismatch(message)


def oracle_agreement(decks: Mapping[str, Deck]) -> str:
    egf = egf_coefficients(30)
    for m in range(2, 31, 2):
        b = bernoulli_modern(m)
        _expect(demorgan_bernoulli(m - 1) == b, f"De Morgan route differs at B{m}")
        _expect(egf.bernoulli(m) == b, f"series route differs at B{m}")
        k = m // 2
        _expect((b > 0) == (k % 2 == 1), f"B{m} has the wrong sign")
    for k, value in enumerate(eq8_sequence(15), start=1):
        _expect(value == bernoulli_modern(2 * k), f"general-form recurrence differs at B{2 * k}")
    return "recurrence, De Morgan, series and general form agree for B2..B30"


def de_morgan_display(decks: Mapping[str, Deck]) -> str:
    row = [finite_diff_zero(k, 7) for k in range(8)]
    _expect(row == [0, 1, 126, 1806, 8400, 16800, 15120, 5040], f"differences of 0^7 are {row}")
    brace = sum(Fraction(p, q) for p, q in demorgan_terms(7))
    _expect(brace == Fraction(17, 16), f"bracket sums to {brace}")
    _expect(demorgan_bernoulli(7) == Fraction(-1, 30), "n = 7 does not give -1/30")
    return "n = 7 bracket = 17/16, B8 = -1/30"


def note_g_cycle(decks: Mapping[str, Deck]) -> str:
    preceding = eq8_sequence(3)
    result = run_note_g_cycle(4, preceding, decks["note_g_cycle"])
    got = result.value(24)
    want = eq8_next(preceding, 4)
    _expect(got == want, f"cycle n = 4 gave {got}, expected {want}")
    passes = max((p for row in result.trace for b, p in row.pass_stack if b == 0), default=0)
    _expect(passes == 2, f"outer block ran {passes} passes, expected 2")
    return "n = 4 cycle gives -1/30 in 2 passes"


def engine_equivalence(decks: Mapping[str, Deck]) -> str:
    for n_max in range(1, 11):
        got = run_note_g_full(n_max, decks["note_g_full"])
        _expect(got == eq8_sequence(n_max), f"n_max = {n_max}: engine gave {[str(g) for g in got]}")
    return "full deck matches the recurrence for n_max = 1..10"


def faulhaber(decks: Mapping[str, Deck]) -> str:
    _expect(faulhaber_sum(10, 1000) == BERNOULLI_31_DIGITS, "tenth powers to 1000")
    _expect(sum(k**10 for k in range(1, 1001)) == BERNOULLI_31_DIGITS, "brute-force tenth powers")
    for p in range(11):
        running = 0
        for x in range(201):
            running += x**p if x else 0
            _expect(faulhaber_sum(p, x) == running, f"p = {p}, x = {x}")
    return "p <= 10, x <= 200 match brute force; 31-digit sum reproduced"


def note_d(decks: Mapping[str, Deck]) -> str:
    deck = decks["note_d"]
    _expect(len(deck.steps) == 11 and not deck.repeats, "Note D deck shape")
    rng = random.Random(NOTE_D_SEED)
    solved = 0
    while solved < 100:
        coeffs = [rng.randint(-9, 9) for _ in range(6)]
        system = LinearSystem2x2(*map(Fraction, coeffs))
        if system.m * system.n2 - system.m2 * system.n == 0:
            continue
        got = run_note_d(system, deck)
        _expect(got == solve_2x2_reference(system), f"system {coeffs}: engine gave {got}")
        solved += 1
    try:
        run_note_d(LinearSystem2x2(*map(Fraction, (1, 1, 1, 2, 2, 2))), deck)
    except StepDivisionByZero as exc:
        _expect(exc.step == 10, f"singular system stopped at step {exc.step}")
    else:
        raise Mismatch("singular system did not stop")
    return "100 random systems solved exactly; singular system stops at step 10"


def prime_demo(decks: Mapping[str, Deck]) -> str:
    deck = decks["primes"]
    inner = {s.number for r in deck.repeats for s in deck.steps if r.contains(s.number)}
    _expect(all(deck.step(n).op is Op.ADD for n in inner), "loop body is not additions only")
    values = run_primes(40, deck)
    _expect(values == [x * x + x + 41 for x in range(40)], "tabulated values differ from x^2 + x + 41")
    composite = [v for v in values if not is_prime_trial(v)]
    _expect(not composite, f"composite values {composite}")
    return "40 values, all prime, f(39) = 1601"


SUITES: dict[str, Callable[[Mapping[str, Deck]], str]] = {
    "oracle-agreement": oracle_agreement,
    "de-morgan-display": de_morgan_display,
    "faulhaber": faulhaber,
    "note-d": note_d,
    "note-g-cycle": note_g_cycle,
    "engine-equivalence": engine_equivalence,
    "prime-demo": prime_demo,
}


def run_check(texts: Optional[Mapping[str, str]] = None) -> list[SuiteResult]:
    """Run every suite against the shipped deck texts (or replacements for them)."""
    texts = dict(texts or {})
    results = []
    decks: dict[str, Deck] = {}
    for name in EMBEDDED:
        decks[name] = parse_deck(texts.get(name) or embedded_text(name))
    for name, suite in SUITES.items():
        try:
            results.append(SuiteResult(name, True, suite(decks)))
        except Exception as exc:  # a crashing suite is a failing suite
            results.append(SuiteResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results


def format_report(results: list[SuiteResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
