import io
import json
import subprocess
import sys

import pytest

from gsos_wb.cli import main
from gsos_wb.corpus import builtin_names, builtin_text


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_lint_spc():
    code, text = run("lint", "--builtin", "spc")
    assert code == 1
    assert text.splitlines()[0] == (
        "condition 2 violated by sum1[tau]: rule has a tau-premise but is not a patience rule"
    )


def test_lint_ccs_core():
    assert run("lint", "--builtin", "ccs-core") == (0, "ccs-core: simply WB cool\n")


def test_lint_spec_file(tmp_path):
    path = tmp_path / "neg.gsos"
    path.write_text(builtin_text("neg-ext"))
    code, text = run("lint", "--spec", str(path))
    assert code == 1 and text.startswith("not positive: neg has a negative premise")


def test_bisim():
    assert run("bisim", "--builtin", "spc", "tau.a.0", "a.0") == (0, "tau.a.0 ≈ a.0\n")
    code, text = run("bisim", "--builtin", "spc", "a.0 + 0", "a.0 + tau.0")
    assert code == 1
    assert text.splitlines() == [
        "a.0 + 0 not ≈ a.0 + tau.0",
        "  a.0 + 0 --tau--> a.0 + 0 is not matched by a.0 + tau.0",
    ]


def test_strong_bisim():
    code, _ = run("bisim", "--builtin", "spc", "--strong", "tau.a.0", "a.0")
    assert code == 1


def test_congruence_imp():
    code, text = run("congruence", "--builtin", "imp-ext", "--depth", "2")
    lines = text.splitlines()
    assert code == 1
    assert lines[0] == "depth 2: 7 argument terms, 84 composites, 17 classes, 1 witness(es)"
    assert "  0 ≈ tau.0 but [0] ≉ [tau.0]" in lines
    assert "  targeted imp: [0] vs [tau.0]: violation" in lines


def test_congruence_ccs_core_passes():
    code, text = run("congruence", "--builtin", "ccs-core", "--depth", "2")
    assert code == 0 and "0 witness(es)" in text


def test_lax_spc():
    code, text = run("lax", "--builtin", "spc", "a.0 + 0")
    assert code == 1
    assert text.splitlines()[1] == "  derived (tau,0) for a.0 + 0 is not a weak transition"


def test_criteria_unitality():
    assert run("criteria", "--builtin", "ccs-core", "--criterion", "unitality") == (
        0,
        "unitality: pass (exhaustive, 4096 cases)\n",
    )


def test_criteria_failure_exit():
    code, text = run("criteria", "--builtin", "imp-ext", "--criterion", "unitality")
    assert code == 1 and text.startswith("unitality: fail")


def test_run_and_dump():
    code, text = run("run", "--builtin", "spc", "tau.a.0")
    assert code == 0 and "tau.a.0 --tau--> a.0" in text.splitlines()
    code, text = run("dump", "--builtin", "ccs-core")
    assert code == 0 and text.rstrip().splitlines()[-1].startswith("# ")


@pytest.mark.parametrize("name", builtin_names())
def test_dump_round_trips_every_builtin(name, tmp_path):
    _, text = run("dump", "--builtin", name)
    path = tmp_path / "spec.gsos"
    path.write_text(text)
    assert run("dump", "--spec", str(path))[1] == text


def test_while_commands():
    assert run("bisim", "--lang", "while", "skip ; skip", "skip")[0] == 0
    code, text = run("run", "--lang", "while", "--weak", "skip ; skip")
    assert code == 0 and "skip ; skip --(0,0)->(0,0)--> ✓" in text
    assert run("congruence", "--lang", "while", "--depth", "1")[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["lint", "--builtin", "spc"],
        ["bisim", "--builtin", "spc", "a.0 + 0", "a.0 + tau.0"],
        ["congruence", "--builtin", "spc", "--depth", "2"],
        ["criteria", "--builtin", "spc", "--criterion", "unitality"],
        ["lax", "--builtin", "spc", "a.0 + 0"],
        ["run", "--builtin", "spc", "--weak", "tau.a.0"],
        ["dump", "--builtin", "spc"],
    ],
)
def test_json_is_single_deterministic_document(argv):
    _, first = run(*argv, "--json")
    _, second = run(*argv, "--json")
    assert first == second
    json.loads(first)


@pytest.mark.parametrize(
    "argv,message",
    [
        (["lint", "--builtin", "nope"], "unknown builtin 'nope'"),
        (["lint", "--builtin", "spc", "--spec", "x"], "exactly one of"),
        (["lint"], "exactly one of"),
        (["bisim", "--builtin", "spc", "(", "0"], "column 2"),
        (["lint", "--spec", "/nonexistent.gsos"], "cannot read"),
        (["congruence", "--builtin", "spc", "--depth", "0"], "depth"),
    ],
)
def test_errors_exit_two(argv, message, capsys):
    code, text = run(*argv)
    err = capsys.readouterr().err
    assert code == 2 and text == ""
    assert err.startswith("gsos-wb: error: ") and message in err


def test_malformed_spec_is_reported(tmp_path, capsys):
    path = tmp_path / "bad.gsos"
    path.write_text("spec bad\nop nil/0;\nrule r: ==> nil -q-> nil;\n")
    assert run("lint", "--spec", str(path))[0] == 2
    assert "gsos-wb: error:" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gsos_wb", "lint", "--builtin", "ccs-core"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "ccs-core: simply WB cool\n"
