"""``aengine``: run decks, compute Bernoulli numbers, check oracles, diff traces.

Exit status: 0 success, 1 verification mismatch, 2 usage or parse error,
3 runtime error in the mill.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bernoulli import (
    Convention,
    InvalidIndex,
    bernoulli,
    demorgan_bernoulli,
    egf_coefficients,
    eq8_sequence,
    faulhaber_sum,
    to_modern_index,
)
from .check import format_report, run_check
from .deck import DEFAULT_CAPACITY, DeckError, load_deck, mutate_flip_operation, serialize_deck
from .mill import MillError, RunLimits, execute, records_to_trace, render_trace_table, trace_to_records
from .numeric import parse_rational, render
from .programs import EMBEDDED, embedded_text, is_prime_trial, run_note_g_full, run_primes

__all__ = ["main", "EXIT_OK", "EXIT_MISMATCH", "EXIT_USAGE", "EXIT_RUNTIME"]

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

CONVENTIONS = {c.value: c for c in Convention}


class UsageError(Exception):
    pass


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _err(text: str) -> None:
    sys.stderr.write(f"aengine: {text}\n")


def _banner(args) -> None:
    if not args.plain:
        _out(f"aengine {__version__}")


def _binding(text: str) -> tuple[int, Fraction]:
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name.startswith("V") or not name[1:].isdigit():
        raise argparse.ArgumentTypeError(f"expected Vk=value, got {text!r}")
    try:
        return int(name[1:]), parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_run(args) -> int:
    deck = load_deck(args.deck, args.capacity)
    bindings = dict(args.set or [])
    result = execute(deck, bindings, RunLimits(args.max_steps), args.capacity)
    if args.trace == "table":
        trace_text = render_trace_table(result.trace, deck)
    elif args.trace == "jsonl":
        trace_text = trace_to_records(result.trace)
    else:
        trace_text = ""
    if args.trace_out:
        Path(args.trace_out).write_text(trace_text, encoding="utf-8")
    elif trace_text:
        sys.stdout.write(trace_text)
    lines = [f"steps executed: {result.steps_executed}"]
    for var, cell in enumerate(result.final_store.cells):
        if cell.revision:
            lines.append(f"V{var} = {render(cell.value)}")
    _out("\n".join(lines))
    return EXIT_OK


def cmd_bernoulli(args) -> int:
    conv = CONVENTIONS[args.convention]
    m = to_modern_index(conv, args.n)
    method = args.method
    if method == "recurrence":
        value = bernoulli(conv, args.n)
    else:
        if method in ("eq8", "engine") and (m < 2 or m % 2):
            raise InvalidIndex(f"method {method} yields only B2, B4, ... (modern index {m})")
        if method == "demorgan" and m < 1:
            raise InvalidIndex("method demorgan yields B1 onwards")
        if method == "eq8":
            value = eq8_sequence(m // 2)[-1]
        elif method == "engine":
            value = run_note_g_full(m // 2)[-1]
        elif method == "demorgan":
            value = demorgan_bernoulli(m - 1)
        else:
            value = egf_coefficients(m).bernoulli(m)
        if conv is Convention.SUM_OF_POWERS and m == 1:
            value = -value
    _out(render(value))
    return EXIT_OK


def cmd_check(args) -> int:
    _banner(args)
    results = run_check()
    sys.stdout.write(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_sum_powers(args) -> int:
    if args.p < 0 or args.x < 0:
        raise UsageError("p and x must be nonnegative")
    value = faulhaber_sum(args.p, args.x)
    if not args.brute_force:
        _out(str(value))
        return EXIT_OK
    brute = sum(k**args.p for k in range(1, args.x + 1))
    verdict = "MATCH" if brute == value else "MISMATCH"
    _out(f"faulhaber:   {value}\nbrute force: {brute}\n{verdict}")
    return EXIT_OK if brute == value else EXIT_MISMATCH


def cmd_primes(args) -> int:
    if args.count < 1:
        raise UsageError("count must be >= 1")
    values = run_primes(args.count)
    bad = 0
    for x, v in enumerate(values):
        ok = is_prime_trial(v)
        bad += not ok
        _out(f"f({x}) = {v}{'' if ok else '  COMPOSITE'}")
    _out(f"{len(values) - bad}/{len(values)} prime")
    return EXIT_OK if not bad else EXIT_MISMATCH


def cmd_mutate(args) -> int:
    deck = load_deck(args.deck, args.capacity)
    mutated = mutate_flip_operation(deck, args.flip_at, args.kind)
    text = serialize_deck(mutated)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_trace(path: str):
    try:
        return records_to_trace(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_diff(args) -> int:
    a, b = _read_trace(args.trace_a), _read_trace(args.trace_b)
    for i, (ra, rb) in enumerate(zip(a, b)):
        if ra != rb:
            where = f"first divergence at ordinal {ra.ordinal}, step {ra.step_number}"
            if ra.step_number != rb.step_number:
                where += f" (vs step {rb.step_number})"
            _out(where)
            for f in ra.__dataclass_fields__:
                if getattr(ra, f) != getattr(rb, f):
                    _out(f"  {f}: {_show(getattr(ra, f))} | {_show(getattr(rb, f))}")
            # the row that first reads a different value shows where the error propagates
            for ra2, rb2 in zip(a[i + 1:], b[i + 1:]):
                if ra2.operands != rb2.operands:
                    _out(f"first operand divergence at ordinal {ra2.ordinal}, step {ra2.step_number}")
                    break
            return EXIT_MISMATCH
    if len(a) != len(b):
        shorter = min(len(a), len(b))
        _out(f"first divergence at ordinal {shorter + 1}: one trace ends after {shorter} rows"
             f" ({len(a)} vs {len(b)})")
        return EXIT_MISMATCH
    _out("identical")
    return EXIT_OK


def _show(value) -> str:
    if isinstance(value, Fraction):
        return render(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(_show(v) for v in value) + ")"
    if hasattr(value, "__dataclass_fields__"):
        inner = ", ".join(f"{f}={_show(getattr(value, f))}" for f in value.__dataclass_fields__)
        return f"{type(value).__name__}({inner})"
    return repr(value)


def cmd_export(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.names or sorted(EMBEDDED):
        if name not in EMBEDDED:
            raise UsageError(f"no embedded deck {name!r}; choose from {', '.join(sorted(EMBEDDED))}")
        path = out / f"{name}.deck"
        path.write_text(embedded_text(name), encoding="utf-8")
        _out(str(path))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aengine", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"aengine {__version__}")
    parser.add_argument("--plain", action="store_true", help="suppress the version banner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a deck file")
    p.add_argument("deck")
    p.add_argument("--set", action="append", type=_binding, metavar="Vk=VALUE", help="bind an INPUT variable")
    p.add_argument("--trace", choices=("table", "jsonl", "none"), default="none")
    p.add_argument("--trace-out", metavar="PATH", help="write the trace here instead of stdout")
    p.add_argument("--max-steps", type=int, default=RunLimits().max_executed_steps)
    p.add_argument("--capacity", type=int, default=DEFAULT_CAPACITY)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bernoulli", help="compute one Bernoulli number")
    p.add_argument("--n", type=int, required=True, help="index in the chosen convention")
    p.add_argument("--convention", choices=sorted(CONVENTIONS), default="modern")
    p.add_argument("--method", choices=("recurrence", "eq8", "demorgan", "egf", "engine"), default="recurrence")
    p.set_defaults(func=cmd_bernoulli)

    p = sub.add_parser("check", help="run every oracle-agreement suite")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sum-powers", help="1^p + 2^p + ... + x^p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=cmd_sum_powers)

    p = sub.add_parser("primes", help="tabulate x^2 + x + 41 on the engine")
    p.add_argument("--count", type=int, default=40)
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("mutate", help="write a deck with one operation changed")
    p.add_argument("deck")
    p.add_argument("--flip-at", type=int, required=True, metavar="STEP")
    p.add_argument("--kind", choices=("sub-add", "swap"), default="sub-add")
    p.add_argument("-o", "--output", metavar="PATH")
    p.add_argument("--capacity", type=int, default=DEFAULT_CAPACITY)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("diff", help="first divergence between two JSON Lines traces")
    p.add_argument("trace_a")
    p.add_argument("trace_b")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("export", help="write the shipped decks as .deck files")
    p.add_argument("names", nargs="*", help=f"subset of {', '.join(sorted(EMBEDDED))}")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DeckError, InvalidIndex, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except MillError as exc:
        _err(str(exc))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
