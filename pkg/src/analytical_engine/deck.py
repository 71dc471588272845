"""Card decks: data model, text format, validation and single-point mutation.

A deck file is line oriented::

    ; comment
    DECK <name>
    INPUT V<k> [label]
    SET V<k> = <rational>
    STEP <i> <OP> <opnd> <opnd> -> V<a> [V<b> [V<c>]] [; annotation]
    REPEAT <start> <end> UNTIL V<c> = 0
    END

``OP`` is one of ADD, SUB, MUL, DIV.  An operand ``V<k>!`` is zeroed after it
is read.  A reference ``V<k>+`` (operand or receiver) is a variable card that
advances: on pass *p* of the innermost repeat block enclosing the step it
addresses ``V<k+p-1>``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .numeric import RATIONAL_PATTERN, parse_rational, render

__all__ = [
    "DEFAULT_CAPACITY",
    "MAX_RECEIVERS",
    "Op",
    "Operand",
    "Target",
    "Step",
    "RepeatBlock",
    "Deck",
    "Diagnostic",
    "DeckError",
    "ParseError",
    "ValidationError",
    "NoSuchStep",
    "InapplicableMutation",
    "parse_deck",
    "load_deck",
    "serialize_deck",
    "validate_deck",
    "mutate_flip_operation",
    "enclosing_blocks",
]

DEFAULT_CAPACITY = 100
MAX_RECEIVERS = 3


class Op(enum.Enum):
    ADD = "+"
    SUB = "−"
    MUL = "×"
    DIV = "÷"

    @property
    def symbol(self) -> str:
        return self.value


@dataclass(frozen=True)
class Operand:
    var: int
    zero_after_read: bool = False
    advance: bool = False

    def __str__(self) -> str:
        return f"V{self.var}{'+' if self.advance else ''}{'!' if self.zero_after_read else ''}"


@dataclass(frozen=True)
class Target:
    var: int
    advance: bool = False

    def __str__(self) -> str:
        return f"V{self.var}{'+' if self.advance else ''}"


@dataclass(frozen=True)
class Step:
    number: int
    op: Op
    left: Operand
    right: Operand
    receivers: tuple[Target, ...]
    annotation: Optional[str] = None
    line: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class RepeatBlock:
    start: int
    end: int
    counter: int
    line: Optional[int] = field(default=None, compare=False, repr=False)

    def contains(self, step_number: int) -> bool:
        return self.start <= step_number <= self.end


@dataclass(frozen=True)
class Deck:
    name: str
    inputs: tuple[tuple[int, Optional[str]], ...] = ()
    presets: tuple[tuple[int, Fraction], ...] = ()
    steps: tuple[Step, ...] = ()
    repeats: tuple[RepeatBlock, ...] = ()

    def step(self, number: int) -> Step:
        if 1 <= number <= len(self.steps) and self.steps[number - 1].number == number:
            return self.steps[number - 1]
        for s in self.steps:
            if s.number == number:
                return s
        raise NoSuchStep(number)

    def variables(self) -> set[int]:
        """Base indices of every variable the deck names."""
        found = {v for v, _ in self.inputs} | {v for v, _ in self.presets}
        for s in self.steps:
            found.update((s.left.var, s.right.var))
            found.update(t.var for t in s.receivers)
        found.update(r.counter for r in self.repeats)
        return found


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    severity: str = "error"
    step: Optional[int] = None
    line: Optional[int] = None

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.step is not None:
            where.append(f"step {self.step}")
        locus = f" ({', '.join(where)})" if where else ""
        return f"{self.severity}[{self.code}]{locus}: {self.message}"


class DeckError(Exception):
    pass


class ParseError(DeckError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(DeckError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class NoSuchStep(DeckError, LookupError):
    def __init__(self, number: int):
        super().__init__(f"no step numbered {number}")
        self.number = number


class InapplicableMutation(DeckError):
    pass


# -- parsing -----------------------------------------------------------------

_VAR = r"V(\d+)"
_OPERAND_RE = re.compile(rf"^{_VAR}(\+?)(!?)$")
_TARGET_RE = re.compile(rf"^{_VAR}(\+?)$")
_INPUT_RE = re.compile(rf"^INPUT\s+{_VAR}(?:\s+(.*))?$")
_SET_RE = re.compile(rf"^SET\s+{_VAR}\s*=\s*({RATIONAL_PATTERN})$")
_STEP_RE = re.compile(r"^STEP\s+(\d+)\s+(\w+)\s+(\S+)\s+(\S+)\s+->\s+(.+?)$")
_REPEAT_RE = re.compile(rf"^REPEAT\s+(\d+)\s+(\d+)\s+UNTIL\s+{_VAR}\s*=\s*0$")


def _operand(token: str, lineno: int) -> Operand:
    m = _OPERAND_RE.match(token)
    if not m:
        raise ParseError(lineno, f"bad operand {token!r}")
    return Operand(int(m.group(1)), zero_after_read=bool(m.group(3)), advance=bool(m.group(2)))


def _target(token: str, lineno: int) -> Target:
    m = _TARGET_RE.match(token)
    if not m:
        raise ParseError(lineno, f"bad receiver {token!r}")
    return Target(int(m.group(1)), advance=bool(m.group(2)))


def _strip_comment(text: str) -> str:
    return text.split(";", 1)[0].strip()


def parse_deck(text: str, capacity: int = DEFAULT_CAPACITY) -> Deck:
    """Parse deck text; raise ParseError on syntax, ValidationError on invariants."""
    name = None
    ended = False
    inputs: list[tuple[int, Optional[str]]] = []
    presets: list[tuple[int, Fraction]] = []
    steps: list[Step] = []
    repeats: list[RepeatBlock] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(";"):
            continue
        if ended:
            raise ParseError(lineno, "text after END")
        keyword = stripped.split(None, 1)[0]

        if keyword == "DECK":
            if name is not None:
                raise ParseError(lineno, "second DECK line")
            name = _strip_comment(stripped[4:])
            if not name:
                raise ParseError(lineno, "DECK needs a name")
            continue
        if name is None:
            raise ParseError(lineno, "deck must begin with a DECK line")

        if keyword == "END":
            if stripped != "END" and _strip_comment(stripped) != "END":
                raise ParseError(lineno, "END takes no arguments")
            ended = True
        elif keyword == "INPUT":
            m = _INPUT_RE.match(_strip_comment(stripped))
            if not m:
                raise ParseError(lineno, "expected INPUT V<k> [label]")
            inputs.append((int(m.group(1)), m.group(2).strip() if m.group(2) else None))
        elif keyword == "SET":
            m = _SET_RE.match(_strip_comment(stripped))
            if not m:
                raise ParseError(lineno, "expected SET V<k> = <number>")
            presets.append((int(m.group(1)), parse_rational(m.group(2))))
        elif keyword == "STEP":
            body, sep, note = stripped.partition(";")
            m = _STEP_RE.match(body.strip())
            if not m:
                raise ParseError(lineno, "expected STEP <i> <OP> <opnd> <opnd> -> V<a> ...")
            try:
                op = Op[m.group(2)]
            except KeyError:
                raise ParseError(lineno, f"unknown operation {m.group(2)!r}") from None
            receivers = tuple(_target(t, lineno) for t in m.group(5).split())
            steps.append(
                Step(
                    number=int(m.group(1)),
                    op=op,
                    left=_operand(m.group(3), lineno),
                    right=_operand(m.group(4), lineno),
                    receivers=receivers,
                    annotation=note.strip() or None if sep else None,
                    line=lineno,
                )
            )
        elif keyword == "REPEAT":
            m = _REPEAT_RE.match(_strip_comment(stripped))
            if not m:
                raise ParseError(lineno, "expected REPEAT <start> <end> UNTIL V<c> = 0")
            repeats.append(RepeatBlock(int(m.group(1)), int(m.group(2)), int(m.group(3)), line=lineno))
        else:
            raise ParseError(lineno, f"unknown directive {keyword!r}")

    last = len(text.splitlines()) or 1
    if name is None:
        raise ParseError(last, "missing DECK line")
    if not ended:
        raise ParseError(last, "missing END")

    deck = Deck(name, tuple(inputs), tuple(presets), tuple(steps), tuple(repeats))
    errors = [d for d in validate_deck(deck, capacity) if d.severity == "error"]
    if errors:
        raise ValidationError(errors)
    return deck


def load_deck(path, capacity: int = DEFAULT_CAPACITY) -> Deck:
    return parse_deck(Path(path).read_text(encoding="utf-8"), capacity)


def serialize_deck(deck: Deck) -> str:
    lines = [f"DECK {deck.name}"]
    for var, label in deck.inputs:
        lines.append(f"INPUT V{var}" + (f" {label}" if label else ""))
    for var, value in deck.presets:
        lines.append(f"SET V{var} = {render(value)}")
    for s in deck.steps:
        targets = " ".join(str(t) for t in s.receivers)
        text = f"STEP {s.number} {s.op.name} {s.left} {s.right} -> {targets}"
        if s.annotation:
            text += f" ; {s.annotation}"
        lines.append(text)
    for r in deck.repeats:
        lines.append(f"REPEAT {r.start} {r.end} UNTIL V{r.counter} = 0")
    lines.append("END")
    return "\n".join(lines) + "\n"


# -- validation --------------------------------------------------------------


def enclosing_blocks(deck: Deck, step_number: int) -> list[int]:
    """Indices of repeat blocks containing the step, outermost first."""
    ids = [i for i, r in enumerate(deck.repeats) if r.contains(step_number)]
    return sorted(ids, key=lambda i: (deck.repeats[i].start, -deck.repeats[i].end, i))


def _text_ok(value: str) -> bool:
    return value == value.strip() and value != "" and ";" not in value and "\n" not in value and "\r" not in value


def validate_deck(deck: Deck, capacity: int = DEFAULT_CAPACITY) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def err(code, message, step=None, line=None):
        diags.append(Diagnostic(code, message, "error", step, line))

    if not _text_ok(deck.name):
        err("text-field", f"deck name {deck.name!r} cannot be written on a DECK line")
    for var, label in deck.inputs:
        if label is not None and not _text_ok(label):
            err("text-field", f"label {label!r} of V{var} cannot be written on an INPUT line")

    if not deck.steps:
        err("no-steps", "deck has no steps")
    for expected, s in enumerate(deck.steps, start=1):
        if s.number != expected:
            err("step-numbering", f"expected step {expected}, found {s.number}", s.number, s.line)
            break

    step_numbers = {s.number for s in deck.steps}
    for s in deck.steps:
        n = len(s.receivers)
        if not 1 <= n <= MAX_RECEIVERS:
            err("receiver-count", f"{n} receivers; must be 1..{MAX_RECEIVERS}", s.number, s.line)
        seen = set()
        for t in s.receivers:
            if t.var in seen:
                err("duplicate-receiver", f"V{t.var} receives twice", s.number, s.line)
            seen.add(t.var)
        if s.annotation is not None and not (s.annotation == s.annotation.strip() and s.annotation
                                             and "\n" not in s.annotation and "\r" not in s.annotation):
            err("text-field", f"annotation {s.annotation!r} cannot be written on a STEP line", s.number, s.line)
        refs = [s.left, s.right, *s.receivers]
        if any(r.advance for r in refs) and not enclosing_blocks(deck, s.number):
            err("advance-scope", "advancing variable outside any repeat block", s.number, s.line)
        for r in refs:
            if r.var >= capacity:
                err("capacity", f"V{r.var} beyond store capacity {capacity}", s.number, s.line)

    for i, r in enumerate(deck.repeats):
        if r.start > r.end:
            err("repeat-range", f"repeat {r.start}..{r.end} runs backwards", line=r.line)
        elif r.start not in step_numbers or r.end not in step_numbers:
            err("repeat-range", f"repeat {r.start}..{r.end} names a missing step", line=r.line)
        if r.counter >= capacity:
            err("capacity", f"counter V{r.counter} beyond store capacity {capacity}", line=r.line)
        for other in deck.repeats[:i]:
            if (other.start, other.end) == (r.start, r.end):
                err("repeat-duplicate", f"repeat {r.start}..{r.end} declared twice", line=r.line)
            elif other.start < r.start <= other.end < r.end or r.start < other.start <= r.end < other.end:
                err(
                    "repeat-overlap",
                    f"repeats {other.start}..{other.end} and {r.start}..{r.end} partially overlap",
                    line=r.line,
                )

    inputs = [v for v, _ in deck.inputs]
    presets = [v for v, _ in deck.presets]
    for kind, vars_ in (("INPUT", inputs), ("SET", presets)):
        for v in sorted({v for v in vars_ if vars_.count(v) > 1}):
            err("binding-conflict", f"V{v} declared by {kind} more than once")
    for v in sorted(set(inputs) & set(presets)):
        err("binding-conflict", f"V{v} is both INPUT and SET")
    for v in sorted(set(inputs) | set(presets)):
        if v >= capacity:
            err("capacity", f"V{v} beyond store capacity {capacity}")
    return diags


# -- mutation ----------------------------------------------------------------

_FLIPS = {Op.SUB: Op.ADD, Op.ADD: Op.SUB}


def mutate_flip_operation(deck: Deck, step_number: int, mutation: str) -> Deck:
    """Return a copy of the deck changed at exactly one step.

    ``mutation`` is ``"sub-add"`` (SUB and ADD exchange) or ``"swap"``
    (the two operands exchange places).
    """
    target = deck.step(step_number)
    if mutation == "sub-add":
        if target.op not in _FLIPS:
            raise InapplicableMutation(f"step {step_number} is {target.op.name}, not ADD or SUB")
        changed = replace(target, op=_FLIPS[target.op])
    elif mutation == "swap":
        if target.left == target.right:
            raise InapplicableMutation(f"step {step_number} has identical operands")
        changed = replace(target, left=target.right, right=target.left)
    else:
        raise InapplicableMutation(f"unknown mutation {mutation!r}")
    steps = tuple(changed if s.number == step_number else s for s in deck.steps)
    return replace(deck, steps=steps)
