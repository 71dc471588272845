"""The mill and store: runs a deck with exact arithmetic and records a trace.

Control flow is sequential except at the end step of a repeat block, where
the block's counter column is inspected and, while it is not zero, control
returns to the block's first step.  The test happens after the body, so a
block always runs at least once.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .deck import DEFAULT_CAPACITY, Deck, Op, RepeatBlock, Step, ValidationError, validate_deck
from .numeric import DivisionByZero, parse_rational, render

__all__ = [
    "VarState",
    "Store",
    "OperandRecord",
    "ReceiverRecord",
    "TraceRow",
    "RunResult",
    "RunLimits",
    "MillError",
    "UnboundInput",
    "UnexpectedBinding",
    "StepDivisionByZero",
    "NonIntegerCounter",
    "LoopLimitExceeded",
    "StoreOverflow",
    "execute",
    "apply_step",
    "render_trace_table",
    "trace_to_records",
    "records_to_trace",
    "REPETITION_MARKER",
]

REPETITION_MARKER = "Here follows a repetition of Operations {start} to {end}."


@dataclass
class VarState:
    value: Fraction = Fraction(0)
    revision: int = 0


class Store:
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("store capacity must be positive")
        self.capacity = capacity
        self.cells = [VarState() for _ in range(capacity)]

    def __getitem__(self, var: int) -> VarState:
        if not 0 <= var < self.capacity:
            raise StoreOverflow(var, self.capacity)
        return self.cells[var]

    def bind(self, var: int, value: Fraction) -> None:
        cell = self[var]
        cell.value = Fraction(value)
        cell.revision += 1

    def values(self) -> list[Fraction]:
        return [c.value for c in self.cells]

    def __eq__(self, other):
        if not isinstance(other, Store):
            return NotImplemented
        return self.capacity == other.capacity and self.cells == other.cells

    def __repr__(self):
        used = {i: (render(c.value), c.revision) for i, c in enumerate(self.cells) if c.revision}
        return f"Store(capacity={self.capacity}, used={used})"


@dataclass(frozen=True)
class OperandRecord:
    var: int
    revision: int
    value: Fraction
    zeroed: bool


@dataclass(frozen=True)
class ReceiverRecord:
    var: int
    revision: int


@dataclass(frozen=True)
class TraceRow:
    ordinal: int
    step_number: int
    pass_stack: tuple[tuple[int, int], ...]
    op_symbol: str
    operands: tuple[OperandRecord, OperandRecord]
    receivers: tuple[ReceiverRecord, ...]
    result: Fraction
    annotation: Optional[str] = None


@dataclass
class RunResult:
    final_store: Store
    trace: list[TraceRow]
    steps_executed: int

    def value(self, var: int) -> Fraction:
        return self.final_store[var].value


@dataclass(frozen=True)
class RunLimits:
    max_executed_steps: int = 1_000_000

    def __post_init__(self):
        if self.max_executed_steps < 1:
            raise ValueError("max_executed_steps must be positive")


class MillError(Exception):
    """A run stopped before the deck finished."""


class UnboundInput(MillError):
    def __init__(self, var: int):
        super().__init__(f"INPUT V{var} has no binding")
        self.var = var


class UnexpectedBinding(MillError):
    def __init__(self, var: int):
        super().__init__(f"V{var} is not an INPUT of this deck")
        self.var = var


class StepDivisionByZero(MillError, DivisionByZero):
    def __init__(self, step: int, ordinal: int):
        super().__init__(f"division by zero at step {step} (operation #{ordinal})")
        self.step = step
        self.ordinal = ordinal


class NonIntegerCounter(MillError):
    def __init__(self, block: RepeatBlock, value: Fraction):
        super().__init__(
            f"counter V{block.counter} of repeat {block.start}..{block.end} holds {render(value)},"
            " not a nonnegative integer"
        )
        self.block = block
        self.value = value


class LoopLimitExceeded(MillError):
    def __init__(self, limit: int):
        super().__init__(f"more than {limit} operations executed")
        self.limit = limit


class StoreOverflow(MillError, IndexError):
    def __init__(self, var: int, capacity: int):
        super().__init__(f"V{var} is outside the store (capacity {capacity})")
        self.var = var
        self.capacity = capacity


_APPLY = {
    Op.ADD: lambda a, b: a + b,
    Op.SUB: lambda a, b: a - b,
    Op.MUL: lambda a, b: a * b,
}


def apply_step(
    store: Store,
    step: Step,
    *,
    ordinal: int = 1,
    pass_stack: tuple[tuple[int, int], ...] = (),
    offset: int = 0,
) -> TraceRow:
    """Execute one operation against the store and describe it.

    Both operands are read before anything is written.  Operands marked
    zero-after-read are then cleared (revision kept), and finally every
    receiver gets the result with its revision bumped, in deck order.
    ``offset`` is added to advancing references.
    """
    left_var = step.left.var + (offset if step.left.advance else 0)
    right_var = step.right.var + (offset if step.right.advance else 0)
    left, right = store[left_var], store[right_var]
    a, b = left.value, right.value
    operands = (
        OperandRecord(left_var, left.revision, a, step.left.zero_after_read),
        OperandRecord(right_var, right.revision, b, step.right.zero_after_read),
    )
    if step.op is Op.DIV:
        if b == 0:
            raise StepDivisionByZero(step.number, ordinal)
        result = a / b
    else:
        result = _APPLY[step.op](a, b)

    targets = [t.var + (offset if t.advance else 0) for t in step.receivers]
    for var in targets:
        store[var]  # bounds check before any write
    if step.left.zero_after_read:
        left.value = Fraction(0)
    if step.right.zero_after_read:
        right.value = Fraction(0)
    receivers = []
    for var in targets:
        cell = store[var]
        cell.value = result
        cell.revision += 1
        receivers.append(ReceiverRecord(var, cell.revision))
    return TraceRow(
        ordinal=ordinal,
        step_number=step.number,
        pass_stack=pass_stack,
        op_symbol=step.op.symbol,
        operands=operands,
        receivers=tuple(receivers),
        result=result,
        annotation=step.annotation,
    )


def _nesting_key(deck: Deck):
    return lambda i: (deck.repeats[i].start, -deck.repeats[i].end, i)


def execute(
    deck: Deck,
    bindings: Optional[Mapping[int, Fraction]] = None,
    limits: Optional[RunLimits] = None,
    capacity: int = DEFAULT_CAPACITY,
) -> RunResult:
    """Run ``deck`` to completion on a fresh store."""
    bindings = dict(bindings or {})
    limits = limits or RunLimits()
    problems = validate_deck(deck, capacity)
    if problems:
        raise ValidationError(problems)

    store = Store(capacity)
    input_vars = {v for v, _ in deck.inputs}
    for var in bindings:
        if var not in input_vars:
            raise UnexpectedBinding(var)
    for var, value in deck.presets:
        store.bind(var, value)
    for var, _ in deck.inputs:
        if var not in bindings:
            raise UnboundInput(var)
        store.bind(var, Fraction(bindings[var]))

    repeats = deck.repeats
    key = _nesting_key(deck)
    # repeat blocks ending at each step, innermost first
    ending: dict[int, list[int]] = {}
    for i in sorted(range(len(repeats)), key=key, reverse=True):
        ending.setdefault(repeats[i].end, []).append(i)

    active: list[int] = []  # block ids, outermost first
    passes: dict[int, int] = {}
    trace: list[TraceRow] = []
    pc = 1
    last = len(deck.steps)

    while pc <= last:
        # leave blocks that do not contain pc, enter those that do
        active = [i for i in active if repeats[i].contains(pc)]
        for i in sorted(range(len(repeats)), key=key):
            if repeats[i].contains(pc) and i not in active:
                active.append(i)
                passes[i] = 1
        active.sort(key=key)

        if len(trace) >= limits.max_executed_steps:
            raise LoopLimitExceeded(limits.max_executed_steps)
        step = deck.steps[pc - 1]
        offset = passes[active[-1]] - 1 if active else 0
        row = apply_step(
            store,
            step,
            ordinal=len(trace) + 1,
            pass_stack=tuple((i, passes[i]) for i in active),
            offset=offset,
        )
        trace.append(row)

        next_pc = pc + 1
        for i in ending.get(pc, ()):
            block = repeats[i]
            count = store[block.counter].value
            if count.denominator != 1 or count < 0:
                raise NonIntegerCounter(block, count)
            if count != 0:
                passes[i] += 1
                inner = {j for j in active if j != i and block.start <= repeats[j].start
                         and repeats[j].end <= block.end}
                active = [j for j in active if j not in inner]
                next_pc = block.start
                break
            active = [j for j in active if j != i]
        pc = next_pc

    return RunResult(store, trace, len(trace))


# -- trace rendering ---------------------------------------------------------


def _ref(var: int, revision: int) -> str:
    return f"^{revision}V{var}"


def _repeated_blocks(prev: Optional[TraceRow], row: TraceRow) -> list[int]:
    if prev is None:
        return []
    before = dict(prev.pass_stack)
    return [bid for bid, n in row.pass_stack if before.get(bid) == n - 1]


def render_trace_table(trace: Sequence[TraceRow], deck: Optional[Deck] = None) -> str:
    """Six-column table in the style of the 1843 diagram.

    A line announcing the repetition is inserted wherever control went back
    to the start of a repeat block.
    """
    headers = (
        "Number of Operation",
        "Nature of Operation",
        "Variables acted upon",
        "Variables receiving results",
        "Indication of change",
        "Statement of Results",
    )
    body: list[object] = []
    prev = None
    for row in trace:
        for bid in _repeated_blocks(prev, row):
            if deck is not None and bid < len(deck.repeats):
                block = deck.repeats[bid]
                body.append(REPETITION_MARKER.format(start=block.start, end=block.end))
            else:
                body.append(REPETITION_MARKER.format(start=row.step_number, end="?"))
        left, right = row.operands
        acted = f"{_ref(left.var, left.revision)} {row.op_symbol} {_ref(right.var, right.revision)}"
        receiving = ", ".join(_ref(r.var, r.revision) for r in row.receivers)
        changes = []
        for o in row.operands:
            if o.zeroed:
                changes.append(f"{_ref(o.var, o.revision)} = 0")
        for r in row.receivers:
            changes.append(f"{_ref(r.var, r.revision - 1)} = {_ref(r.var, r.revision)}")
        value = render(row.result)
        if not row.annotation:
            statement = f"= {value}"
        elif row.annotation.endswith(f"= {value}"):
            statement = row.annotation
        else:
            statement = f"{row.annotation} = {value}"
        body.append((str(row.step_number), row.op_symbol, acted, receiving, "; ".join(changes), statement))
        prev = row

    widths = [len(h) for h in headers]
    for cells in body:
        if isinstance(cells, tuple):
            widths = [max(w, len(c)) for w, c in zip(widths, cells)]

    def fmt(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines = [fmt(headers), "-+-".join("-" * w for w in widths)]
    for cells in body:
        lines.append(fmt(cells) if isinstance(cells, tuple) else cells)
    return "\n".join(lines) + "\n"


def _row_record(row: TraceRow) -> dict:
    return {
        "ordinal": row.ordinal,
        "step_number": row.step_number,
        "pass_stack": [list(p) for p in row.pass_stack],
        "op_symbol": row.op_symbol,
        "operands": [
            {"var": o.var, "revision": o.revision, "value": render(o.value), "zeroed": o.zeroed}
            for o in row.operands
        ],
        "receivers": [{"var": r.var, "revision": r.revision} for r in row.receivers],
        "result": render(row.result),
        "annotation": row.annotation,
    }


def trace_to_records(trace: Sequence[TraceRow]) -> str:
    """One JSON object per line; field order and spacing are fixed."""
    return "".join(json.dumps(_row_record(row), ensure_ascii=False) + "\n" for row in trace)


def records_to_trace(text: str) -> list[TraceRow]:
    """Inverse of :func:`trace_to_records`; raises ValueError on anything else."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            left, right = (
                OperandRecord(o["var"], o["revision"], parse_rational(o["value"]), o["zeroed"])
                for o in rec["operands"]
            )
            rows.append(
                TraceRow(
                    ordinal=rec["ordinal"],
                    step_number=rec["step_number"],
                    pass_stack=tuple((b, n) for b, n in rec["pass_stack"]),
                    op_symbol=rec["op_symbol"],
                    operands=(left, right),
                    receivers=tuple(ReceiverRecord(r["var"], r["revision"]) for r in rec["receivers"]),
                    result=parse_rational(rec["result"]),
                    annotation=rec["annotation"],
                )
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: not a trace record ({exc})") from None
    return rows
