"""Historical decks (Note D, Note G, the x^2 + x + 41 table) and their oracles."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import isqrt
from typing import Callable, Optional, Sequence

from ..deck import Deck, Op, Operand, RepeatBlock, Step, Target
from ..mill import RunLimits, RunResult, execute

__all__ = [
    "LinearSystem2x2",
    "SingularSystem",
    "NoteGLayout",
    "NoteGTerm",
    "NOTE_G",
    "note_d_deck",
    "solve_2x2_reference",
    "note_g_cycle_deck",
    "note_g_full_deck",
    "note_g_terms",
    "prime_poly_deck",
    "is_prime_trial",
    "run_note_d",
    "run_note_g_cycle",
    "run_note_g_full",
    "run_primes",
    "EMBEDDED",
    "embedded_text",
]


def _step(number, op, left, right, receivers, note=None):
    def operand(ref):
        if isinstance(ref, Operand):
            return ref
        return Operand(ref)

    def target(ref):
        return ref if isinstance(ref, Target) else Target(ref)

    return Step(number, op, operand(left), operand(right), tuple(target(r) for r in receivers), note)


def _given_off(var):
    return Operand(var, zero_after_read=True)


# -- Note D ------------------------------------------------------------------


@dataclass(frozen=True)
class LinearSystem2x2:
    """mx + ny = d and m'x + n'y = d'."""

    m: Fraction
    n: Fraction
    d: Fraction
    m2: Fraction
    n2: Fraction
    d2: Fraction

    def as_bindings(self) -> dict[int, Fraction]:
        values = (self.m, self.n, self.d, self.m2, self.n2, self.d2)
        return {var: Fraction(v) for var, v in enumerate(values)}


class SingularSystem(ArithmeticError):
    pass


def note_d_deck() -> Deck:
    """Eleven straight-line operations solving a 2x2 system by Cramer's rule.

    Data in V0..V5, nine working columns V6..V14, x and y in V15 and V16.
    """
    mul, sub, div = Op.MUL, Op.SUB, Op.DIV
    steps = (
        _step(1, mul, 0, 4, [6], "= mn'"),
        _step(2, mul, 3, 1, [7], "= m'n"),
        _step(3, mul, 2, 4, [8], "= dn'"),
        _step(4, mul, 5, 1, [9], "= d'n"),
        _step(5, mul, 5, 0, [10], "= d'm"),
        _step(6, mul, 2, 3, [11], "= dm'"),
        _step(7, sub, _given_off(6), _given_off(7), [12], "= mn' - m'n"),
        _step(8, sub, _given_off(8), _given_off(9), [13], "= dn' - d'n"),
        _step(9, sub, _given_off(10), _given_off(11), [14], "= d'm - dm'"),
        _step(10, div, _given_off(13), 12, [15], "= (dn' - d'n)/(mn' - m'n) = x"),
        _step(11, div, _given_off(14), _given_off(12), [16], "= (d'm - dm')/(mn' - m'n) = y"),
    )
    labels = ("m", "n", "d", "m'", "n'", "d'")
    return Deck("note-d", tuple(enumerate(labels)), (), steps, ())


def solve_2x2_reference(system: LinearSystem2x2) -> tuple[Fraction, Fraction]:
    s = system
    det = Fraction(s.m) * s.n2 - Fraction(s.m2) * s.n
    if det == 0:
        raise SingularSystem("mn' - m'n = 0")
    x = (Fraction(s.d) * s.n2 - Fraction(s.d2) * s.n) / det
    y = (Fraction(s.d2) * s.m - Fraction(s.d) * s.m2) / det
    return x, y


def run_note_d(system: LinearSystem2x2, deck: Optional[Deck] = None) -> tuple[Fraction, Fraction]:
    result = execute(deck or note_d_deck(), system.as_bindings())
    return result.value(15), result.value(16)


# -- Note G ------------------------------------------------------------------


@dataclass(frozen=True)
class NoteGLayout:
    zero: int = 0
    one: int = 1
    two: int = 2
    n: int = 3
    numerator: int = 6
    denominator: int = 7
    factor: int = 8
    bootstrap: int = 9
    counter: int = 10
    coefficient: int = 11
    term: int = 12
    accumulator: int = 13
    outer_counter: int = 14
    bootstrap_step: int = 15
    bootstrap_next: int = 16
    first_result: int = 21

    data_vars = range(0, 4)
    working_vars = range(4, 17)

    def result_vars(self, count: int) -> range:
        return range(self.first_result, self.first_result + count)

    def result_var(self, n: int) -> int:
        """Column receiving odd-numbered B_{2n-1}."""
        return self.first_result + n - 1


NOTE_G = NoteGLayout()


@dataclass(frozen=True)
class NoteGTerm:
    k: int
    a_value: Fraction
    contribution: Fraction


def note_g_terms(n: int, preceding: Sequence[Fraction]) -> list[NoteGTerm]:
    """Terms A_0, B_1 A_1, B_3 A_3, ... of one cycle, coefficients built as the deck builds them."""
    a0 = -Fraction(2 * n - 1, 2 * n + 1) / 2
    terms = [NoteGTerm(0, a0, a0)]
    a = Fraction(2 * n, 2)
    for k, b in enumerate(preceding, start=1):
        if k > 1:
            a *= Fraction(2 * n - 2 * k + 3, 2 * k - 1) * Fraction(2 * n - 2 * k + 2, 2 * k)
        terms.append(NoteGTerm(k, a, b * a))
    return terms


def _cycle_steps(first: int, result: Target, result_note: str) -> list[Step]:
    """The 25 operations of one cycle, numbered from ``first``."""
    L = NOTE_G
    add, sub, mul, div = Op.ADD, Op.SUB, Op.MUL, Op.DIV
    rows = [
        (mul, L.two, L.n, [4, 5, L.numerator], "= 2n"),
        (sub, 4, L.one, [4], "= 2n - 1"),
        (add, 5, L.one, [5], "= 2n + 1"),
        (div, _given_off(4), _given_off(5), [L.coefficient], "= (2n - 1)/(2n + 1)"),
        (div, L.coefficient, L.two, [L.coefficient], "= (1/2)(2n - 1)/(2n + 1)"),
        (sub, L.accumulator, L.coefficient, [L.accumulator], "= -(1/2)(2n - 1)/(2n + 1) = A0"),
        (sub, L.n, L.bootstrap, [L.counter], "= n - 1"),
        (add, L.two, L.zero, [L.denominator], "= 2"),
        (div, L.numerator, L.denominator, [L.coefficient], "= 2n/2 = A1"),
        (mul, L.first_result, L.coefficient, [L.term], "= B1 A1"),
        (add, L.term, L.accumulator, [L.accumulator], "= A0 + B1 A1"),
        (sub, L.counter, L.one, [L.counter], "= n - 2"),
        (sub, L.numerator, L.one, [L.numerator], "= 2n - 2k + 1"),
        (add, L.one, L.denominator, [L.denominator], "= 2k + 1"),
        (div, L.numerator, L.denominator, [L.factor], "= (2n - 2k + 1)/(2k + 1)"),
        (mul, L.factor, L.coefficient, [L.coefficient], "= A(2k - 1)(2n - 2k + 1)/(2k + 1)"),
        (sub, L.numerator, L.one, [L.numerator], "= 2n - 2k"),
        (add, L.one, L.denominator, [L.denominator], "= 2k + 2"),
        (div, L.numerator, L.denominator, [L.factor], "= (2n - 2k)/(2k + 2)"),
        (mul, L.factor, L.coefficient, [L.coefficient], "= A(2k + 1)"),
        (mul, Operand(L.first_result + 1, advance=True), L.coefficient, [L.term], "= B(2k + 1) A(2k + 1)"),
        (add, L.term, L.accumulator, [L.accumulator], "= A0 + B1 A1 + ... + B(2k + 1) A(2k + 1)"),
        (sub, L.counter, L.one, [L.counter], "= n - 2 - k"),
        (sub, L.zero, _given_off(L.accumulator), [result], result_note),
        (add, L.one, L.n, [L.n], "= n + 1"),
    ]
    return [_step(first + i, op, a, b, r, note) for i, (op, a, b, r, note) in enumerate(rows)]


def _cycle_repeats(first: int) -> tuple[RepeatBlock, ...]:
    base = first - 1
    return (
        RepeatBlock(base + 13, base + 23, NOTE_G.counter),
        RepeatBlock(base + 13, base + 16, NOTE_G.zero),
        RepeatBlock(base + 17, base + 20, NOTE_G.zero),
    )


def note_g_cycle_deck(n: int) -> Deck:
    """One cycle of the general-form recurrence: B_1..B_{2n-3} in, B_{2n-1} out.

    The outer block 13..23 runs n - 2 times for n >= 3.  The counter comes
    from n minus the bootstrap column, preset to min(1, n - 2) so that n = 1
    and n = 2 get a single pass; that pass multiplies by a still-empty B
    column and contributes nothing.  The factor groups 13..16 and 17..20 are
    driven by the zero column and so run once per outer pass.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    L = NOTE_G
    presets = (
        (L.one, Fraction(1)),
        (L.two, Fraction(2)),
        (L.n, Fraction(n)),
        (L.bootstrap, Fraction(min(1, n - 2))),
    )
    inputs = tuple((L.result_var(k), f"B{2 * k - 1}") for k in range(1, n))
    steps = _cycle_steps(1, Target(L.result_var(n)), f"= B{2 * n - 1}")
    return Deck(f"note-g-cycle-{n}", inputs, presets, tuple(steps), _cycle_repeats(1))


def note_g_full_deck(n_max: Optional[int] = None) -> Deck:
    """Cycles for n = 1, 2, ... depositing B_1, B_3, ... into V21, V22, ...

    With ``n_max`` None the count is an INPUT on V3; two setup operations
    move it to the outer counter and put n = 1 in V3.  After each cycle the
    bootstrap column steps through -1, 0, 1, 1, ... and the outer counter
    drops by one.
    """
    L = NOTE_G
    add, sub = Op.ADD, Op.SUB
    setup = [
        _step(1, add, L.n, L.zero, [L.outer_counter], "= n_max"),
        _step(2, add, L.one, L.zero, [L.n], "= 1 = n"),
    ]
    cycle = _cycle_steps(3, Target(L.first_result, advance=True), "= B(2n - 1)")
    tail = [
        _step(28, add, L.bootstrap, L.bootstrap_step, [L.bootstrap], "= bootstrap offset"),
        _step(29, add, _given_off(L.bootstrap_next), L.zero, [L.bootstrap_step], "= next offset step"),
        _step(30, sub, L.outer_counter, L.one, [L.outer_counter], "= cycles remaining"),
    ]
    presets = [
        (L.one, Fraction(1)),
        (L.two, Fraction(2)),
        (L.bootstrap, Fraction(-1)),
        (L.bootstrap_step, Fraction(1)),
        (L.bootstrap_next, Fraction(1)),
    ]
    if n_max is None:
        inputs = ((L.n, "n_max"),)
        name = "note-g-full"
    else:
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        inputs = ()
        presets.insert(2, (L.n, Fraction(n_max)))
        name = f"note-g-full-{n_max}"
    repeats = _cycle_repeats(3) + (RepeatBlock(3, 30, L.outer_counter),)
    return Deck(name, inputs, tuple(presets), tuple(setup + cycle + tail), repeats)


def _note_g_capacity(count: int) -> int:
    return max(100, NOTE_G.first_result + count + 1)


def run_note_g_cycle(n: int, preceding: Sequence[Fraction], deck: Optional[Deck] = None) -> RunResult:
    deck = deck or note_g_cycle_deck(n)
    bindings = {NOTE_G.result_var(k): Fraction(b) for k, b in enumerate(preceding, start=1)}
    return execute(deck, bindings, capacity=_note_g_capacity(n))


def run_note_g_full(n_max: int, deck: Optional[Deck] = None, limits: Optional[RunLimits] = None) -> list[Fraction]:
    """B_1, B_3, ..., B_{2 n_max - 1} as computed by the engine."""
    deck = deck or note_g_full_deck()
    bindings = {NOTE_G.n: Fraction(n_max)} if deck.inputs else {}
    result = execute(deck, bindings, limits, capacity=_note_g_capacity(n_max))
    return [result.value(v) for v in NOTE_G.result_vars(n_max)]


# -- x^2 + x + 41 --------------------------------------------------------------

PRIME_FIRST_RESULT = 10


def prime_poly_deck(count: int) -> Deck:
    """Tabulate f(x) = x^2 + x + 41 for x = 0..count-1 by adding differences.

    Every operation in the loop is an addition; the counter is brought down
    by adding -1.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    add = Op.ADD
    presets = (
        (1, Fraction(-1)),
        (2, Fraction(2)),
        (3, Fraction(41)),
        (4, Fraction(2)),
        (5, Fraction(count)),
    )
    steps = (
        _step(1, add, 3, 0, [Target(PRIME_FIRST_RESULT, advance=True)], "= f(x)"),
        _step(2, add, 3, 4, [3], "= f(x + 1)"),
        _step(3, add, 4, 2, [4], "= f(x + 2) - f(x + 1)"),
        _step(4, add, 5, 1, [5], "= values still to tabulate"),
    )
    return Deck(f"prime-poly-{count}", (), presets, steps, (RepeatBlock(1, 4, 5),))


def run_primes(count: int, deck: Optional[Deck] = None) -> list[int]:
    deck = deck or prime_poly_deck(count)
    result = execute(deck, capacity=max(100, PRIME_FIRST_RESULT + count + 1))
    values = [result.value(PRIME_FIRST_RESULT + i) for i in range(count)]
    return [int(v) for v in values]


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, isqrt(n) + 1))


# -- embedded decks --------------------------------------------------------------

EMBEDDED: dict[str, Callable[[], Deck]] = {
    "note_d": note_d_deck,
    "note_g_cycle": lambda: note_g_cycle_deck(4),
    "note_g_full": lambda: note_g_full_deck(),
    "primes": lambda: prime_poly_deck(40),
}


def embedded_text(name: str) -> str:
    """Canonical text of a shipped deck, as stored in the package."""
    if name not in EMBEDDED:
        raise KeyError(f"no embedded deck {name!r}; choose from {sorted(EMBEDDED)}")
    return resources.files(__package__).joinpath("decks", f"{name}.deck").read_text(encoding="utf-8")
