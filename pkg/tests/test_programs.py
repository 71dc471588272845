import random
from fractions import Fraction

import pytest

from analytical_engine.bernoulli import eq8_coefficients, eq8_next, eq8_sequence
from analytical_engine.deck import Op, parse_deck, serialize_deck
from analytical_engine.mill import StepDivisionByZero, execute
from analytical_engine.programs import (
    EMBEDDED,
    NOTE_G,
    LinearSystem2x2,
    SingularSystem,
    embedded_text,
    is_prime_trial,
    note_d_deck,
    note_g_cycle_deck,
    note_g_full_deck,
    note_g_terms,
    prime_poly_deck,
    run_note_d,
    run_note_g_cycle,
    run_note_g_full,
    run_primes,
    solve_2x2_reference,
)


def system(*coeffs):
    return LinearSystem2x2(*map(Fraction, coeffs))


def test_note_d_shape():
    deck = note_d_deck()
    assert len(deck.steps) == 11
    assert deck.repeats == ()
    assert [s.op for s in deck.steps].count(Op.MUL) == 6
    assert [label for _, label in deck.inputs] == ["m", "n", "d", "m'", "n'", "d'"]


def test_note_d_small_system():
    # x + y = 3, x - y = 1
    assert run_note_d(system(1, 1, 3, 1, -1, 1)) == (2, 1)


def test_note_d_fractional_answer():
    s = system(2, 3, 1, 4, -5, 7)
    assert run_note_d(s) == solve_2x2_reference(s) == (Fraction(26, 22), Fraction(-10, 22))


def test_note_d_random_systems():
    rng = random.Random(5)
    for _ in range(50):
        s = system(*(rng.randint(-20, 20) for _ in range(6)))
        try:
            expected = solve_2x2_reference(s)
        except SingularSystem:
            with pytest.raises(StepDivisionByZero):
                run_note_d(s)
            continue
        assert run_note_d(s) == expected


def test_note_d_singular_stops_at_division():
    with pytest.raises(StepDivisionByZero) as info:
        run_note_d(system(1, 2, 3, 2, 4, 6))
    assert info.value.step == 10
    with pytest.raises(SingularSystem):
        solve_2x2_reference(system(1, 2, 3, 2, 4, 6))


def test_cycle_deck_structure():
    deck = note_g_cycle_deck(4)
    assert len(deck.steps) == 25
    assert {(r.start, r.end) for r in deck.repeats} == {(13, 23), (13, 16), (17, 20)}
    assert deck.step(6).op is Op.SUB
    assert deck.step(24).receivers[0].var == NOTE_G.result_var(4) == 24


@pytest.mark.parametrize("n", range(1, 9))
def test_cycle_matches_recurrence(n):
    preceding = eq8_sequence(n)[:-1]
    result = run_note_g_cycle(n, preceding)
    assert result.value(NOTE_G.result_var(n)) == eq8_next(preceding, n)
    outer = max(p for row in result.trace for b, p in row.pass_stack if b == 0)
    assert outer == max(1, n - 2)


def test_cycle_n4_values():
    result = run_note_g_cycle(4, [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42)])
    assert result.value(24) == Fraction(-1, 30)
    assert result.value(NOTE_G.n) == 5  # n advanced for the next cycle
    assert result.value(NOTE_G.accumulator) == 0


def test_note_g_terms_match_coefficients():
    for n in range(1, 9):
        terms = note_g_terms(n, eq8_sequence(n)[:-1])
        assert [t.a_value for t in terms] == eq8_coefficients(n)[:-1]
        assert -sum(t.contribution for t in terms) == eq8_sequence(n)[-1]


def test_full_deck_first_ten():
    assert run_note_g_full(10) == [
        Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
        Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
        Fraction(-174611, 330),
    ]


def test_full_deck_preset_form_agrees():
    deck = note_g_full_deck(6)
    assert deck.inputs == ()
    assert run_note_g_full(6, deck) == eq8_sequence(6)


def test_full_deck_goes_past_default_capacity():
    assert run_note_g_full(15) == eq8_sequence(15)


def test_full_deck_uses_no_inputs_beyond_n():
    deck = note_g_full_deck()
    assert deck.inputs == ((NOTE_G.n, "n_max"),)


def test_primes_deck():
    deck = prime_poly_deck(40)
    assert {s.op for s in deck.steps} == {Op.ADD}
    values = run_primes(40)
    assert values[0] == 41 and values[39] == 1601
    assert values == [x * x + x + 41 for x in range(40)]
    assert all(map(is_prime_trial, values))


def test_polynomial_fails_at_40():
    values = run_primes(41)
    assert values[40] == 1681 == 41 * 41
    assert not is_prime_trial(values[40])


@pytest.mark.parametrize("n, expected", [(0, False), (1, False), (2, True), (9, False), (97, True), (1601, True)])
def test_is_prime_trial(n, expected):
    assert is_prime_trial(n) is expected


def test_embedded_texts_match_constructors():
    for name, build in EMBEDDED.items():
        assert embedded_text(name) == serialize_deck(build())
        assert parse_deck(embedded_text(name)) == build()
    with pytest.raises(KeyError):
        embedded_text("nope")


def test_constructor_arguments():
    for bad in (lambda: note_g_cycle_deck(0), lambda: note_g_full_deck(0), lambda: prime_poly_deck(0)):
        with pytest.raises(ValueError):
            bad()


def test_full_deck_runs_deterministically():
    deck = note_g_full_deck()
    a = execute(deck, {3: Fraction(5)}, capacity=100)
    b = execute(deck, {3: Fraction(5)}, capacity=100)
    assert a.trace == b.trace and a.final_store == b.final_store
