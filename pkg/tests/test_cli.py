import json

import pytest

from analytical_engine.cli import EXIT_MISMATCH, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from analytical_engine.programs import EMBEDDED, embedded_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def decks(tmp_path, capsys):
    assert main(["export", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    return tmp_path


def test_export_writes_every_deck(decks):
    for name in EMBEDDED:
        assert (decks / f"{name}.deck").read_text() == embedded_text(name)


def test_export_unknown_name(tmp_path, capsys):
    assert run(capsys, "export", "nope", "--out-dir", str(tmp_path))[0] == EXIT_USAGE


def test_run_full_deck_table(decks, capsys):
    code, out, _ = run(capsys, "run", str(decks / "note_g_full.deck"), "--set", "V3=4", "--trace", "table")
    assert code == EXIT_OK
    assert "Here follows a repetition of Operations 15 to 25." in out
    assert out.rstrip().endswith("V24 = -1/30")
    assert "V21 = 1/6" in out


def test_run_trace_out(decks, capsys, tmp_path):
    target = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "run", str(decks / "primes.deck"), "--trace", "jsonl", "--trace-out", str(target))
    assert code == EXIT_OK
    assert "V49 = 1601" in out
    rows = [json.loads(line) for line in target.read_text().splitlines()]
    assert len(rows) == 160 and rows[0]["ordinal"] == 1


def test_run_missing_file(capsys):
    assert run(capsys, "run", "missing.deck")[0] == EXIT_USAGE


def test_run_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.deck"
    bad.write_text("DECK x\nSTEP 1 ADD V1 -> V2\nEND\n")
    code, _, err = run(capsys, "run", str(bad))
    assert code == EXIT_USAGE and "line 2" in err


def test_run_division_by_zero(tmp_path, capsys):
    div0 = tmp_path / "div0.deck"
    div0.write_text("DECK div0\nSET V1 = 1\nSTEP 1 DIV V1 V0 -> V2\nEND\n")
    code, _, err = run(capsys, "run", str(div0))
    assert code == EXIT_RUNTIME and "step 1" in err


@pytest.mark.parametrize("binding", ["V3", "3=4", "V3=1.5", "Vx=2"])
def test_run_bad_binding(decks, capsys, binding):
    assert run(capsys, "run", str(decks / "note_g_full.deck"), "--set", binding)[0] == EXIT_USAGE


def test_run_max_steps(decks, capsys):
    code, _, _ = run(capsys, "run", str(decks / "note_g_full.deck"), "--set", "V3=5", "--max-steps", "10")
    assert code == EXIT_RUNTIME


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--n", "10", "--convention", "modern", "--method", "demorgan"], "5/66"),
        (["--n", "3", "--convention", "modern", "--method", "recurrence"], "0"),
        (["--n", "1"], "-1/2"),
        (["--n", "1", "--convention", "sum-of-powers"], "1/2"),
        (["--n", "1", "--convention", "sum-of-powers", "--method", "egf"], "1/2"),
        (["--n", "1", "--convention", "sum-of-powers", "--method", "demorgan"], "1/2"),
        (["--n", "5", "--convention", "lovelace", "--method", "engine"], "1/42"),
        (["--n", "7", "--convention", "lovelace", "--method", "engine"], "-1/30"),
        (["--n", "12", "--method", "eq8"], "-691/2730"),
        (["--n", "20", "--method", "egf"], "-174611/330"),
    ],
)
def test_bernoulli(capsys, argv, expected):
    code, out, _ = run(capsys, "bernoulli", *argv)
    assert code == EXIT_OK and out == expected + "\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["--n", "3", "--method", "eq8"],
        ["--n", "0", "--method", "engine"],
        ["--n", "0", "--method", "demorgan"],
        ["--n", "4", "--convention", "lovelace"],
        ["--n", "-2"],
        ["--n", "2", "--method", "guess"],
    ],
)
def test_bernoulli_invalid(capsys, argv):
    assert run(capsys, "bernoulli", *argv)[0] == EXIT_USAGE


def test_sum_powers(capsys):
    code, out, _ = run(capsys, "sum-powers", "--p", "10", "--x", "1000", "--brute-force")
    assert code == EXIT_OK
    assert out.count("91409924241424243424241924242500") == 2 and "MATCH" in out
    assert run(capsys, "sum-powers", "--p", "0", "--x", "7")[1] == "7\n"
    assert run(capsys, "sum-powers", "--p", "10", "--x", "2")[1] == "1025\n"
    assert run(capsys, "sum-powers", "--p", "-1", "--x", "2")[0] == EXIT_USAGE


def test_primes(capsys):
    code, out, _ = run(capsys, "primes", "--count", "40")
    assert code == EXIT_OK and "f(39) = 1601" in out and "40/40 prime" in out
    code, out, _ = run(capsys, "primes", "--count", "41")
    assert code == EXIT_MISMATCH and "f(40) = 1681  COMPOSITE" in out
    assert run(capsys, "primes", "--count", "0")[0] == EXIT_USAGE


def test_check_passes_and_banner(capsys):
    code, out, _ = run(capsys, "check")
    assert code == EXIT_OK
    assert out.startswith("aengine ")
    assert "7/7 suites passed" in out
    _, plain, _ = run(capsys, "--plain", "check")
    assert plain == out.split("\n", 1)[1]


def test_mutate_and_diff(decks, capsys, tmp_path):
    good, bad = decks / "note_g_cycle.deck", tmp_path / "bad.deck"
    assert run(capsys, "mutate", str(good), "--flip-at", "6", "--kind", "sub-add", "-o", str(bad))[0] == EXIT_OK
    assert "STEP 6 ADD V13 V11 -> V13" in bad.read_text()
    bindings = ["--set", "V21=1/6", "--set", "V22=-1/30", "--set", "V23=1/42", "--trace", "jsonl"]
    traces = []
    for deck in (good, bad):
        path = tmp_path / f"{deck.stem}.jsonl"
        run(capsys, "run", str(deck), *bindings, "--trace-out", str(path))
        traces.append(str(path))
    code, out, _ = run(capsys, "diff", traces[0], traces[0])
    assert (code, out) == (EXIT_OK, "identical\n")
    code, out, _ = run(capsys, "diff", *traces)
    assert code == EXIT_MISMATCH
    assert out.startswith("first divergence at ordinal 6, step 6")
    assert "op_symbol" in out and "result: -7/18 | 7/18" in out


def test_mutate_inapplicable(decks, capsys):
    assert run(capsys, "mutate", str(decks / "note_d.deck"), "--flip-at", "1", "--kind", "sub-add")[0] == EXIT_USAGE
    assert run(capsys, "mutate", str(decks / "note_d.deck"), "--flip-at", "99")[0] == EXIT_USAGE


def test_diff_rejects_table(decks, capsys, tmp_path):
    table = tmp_path / "t.txt"
    run(capsys, "run", str(decks / "primes.deck"), "--trace", "table", "--trace-out", str(table))
    assert run(capsys, "diff", str(table), str(table))[0] == EXIT_USAGE


def test_diff_length_mismatch(tmp_path, capsys, decks):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "run", str(decks / "primes.deck"), "--trace", "jsonl", "--trace-out", str(a))
    b.write_text("".join(a.read_text().splitlines(keepends=True)[:5]))
    code, out, _ = run(capsys, "diff", str(a), str(b))
    assert code == EXIT_MISMATCH and "ordinal 6" in out


def test_usage_errors(capsys):
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "--help")[0] == EXIT_OK
