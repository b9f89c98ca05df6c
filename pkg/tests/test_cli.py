import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from destcalc.cli import main

CORPUS = resources.files("destcalc.corpus")
GOLDEN = Path(__file__).parent / "golden"


def corpus(name):
    return str(CORPUS.joinpath(name))


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_forget(capsys):
    code, out, err = cli(capsys, "check", corpus("forget.ld"))
    assert code == 1 and out == ""
    assert "TY-TERM-UPDA" in err and "d :1v is unused" in err


def test_run_unit(capsys):
    assert cli(capsys, "run", corpus("unit.ld")) == (0, "()\n", "")


def test_run_dlist_demo(capsys):
    assert cli(capsys, "run", corpus("dlist_demo.ld")) == (0, "[0, 1, 0, 2]\n", "")


def test_run_pretty(capsys):
    code, out, _ = cli(capsys, "run", corpus("sound.ld"), "--decode", "pretty")
    assert (code, out) == (0, "Inl ()\n")


def test_check_prints_type(capsys):
    assert cli(capsys, "check", corpus("sound.ld")) == (0, "1 (+) 1\n", "")


def test_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.ld"
    f.write_text("main = (")
    code, out, err = cli(capsys, "check", str(f))
    assert code == 2 and out == ""
    assert err == f"{f}:1:9: error: expected a term, found 'end of input'\n"


def test_missing_file(capsys):
    code, _, err = cli(capsys, "check", "/nonexistent.ld")
    assert code == 2 and "No such file" in err


def test_budget(capsys):
    code, out, err = cli(capsys, "run", corpus("cons.ld"), "--max-steps", "10")
    assert code == 4 and out == "" and "budget of 10" in err


def test_extension_required(capsys, tmp_path):
    f = tmp_path / "rec.ld"
    f.write_text("main : List 1 = toList (new : List 1)")
    code, _, err = cli(capsys, "check", str(f))
    assert code == 1 and "--ext rec" in err
    assert cli(capsys, "run", str(f), "--ext", "rec") == (0, "[]\n", "")


def test_trace_matches_golden(capsys):
    path = GOLDEN / "pat_exp.ld"
    code, out, _ = cli(capsys, "trace", str(path))
    assert code == 0 and out == path.with_suffix(".trace").read_text()


def test_run_trace_then_value(capsys):
    code, out, _ = cli(capsys, "run", str(GOLDEN / "pat_exp.ld"), "--trace")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("0000  START") and lines[-1] == "()"


def test_run_meta(capsys):
    code, out, _ = cli(capsys, "run", corpus("sound.ld"), "--meta")
    assert code == 0
    assert out.splitlines()[0] == "true"
    assert out.splitlines()[1].startswith(f"{corpus('sound.ld')}: ok,")


def test_corpus_subset(capsys):
    code, out, _ = cli(capsys, "corpus", "forget", "unit")
    assert code == 0
    assert out == "PASS forget: rejected by TY-TERM-UPDA\nPASS unit: value null\n2/2 passed\n"


def test_corpus_records(capsys):
    code, out, _ = cli(capsys, "corpus", "sound", "--format", "records")
    assert code == 0
    assert json.loads(out) == {"name": "sound", "ok": True, "detail": "value true", "steps": 85}


def test_corpus_unknown(capsys):
    code, _, err = cli(capsys, "corpus", "nope")
    assert code == 5 and "nope" in err


def test_meta_records(capsys):
    code, out, _ = cli(capsys, "meta", corpus("sound.ld"), "--format", "records")
    rec = json.loads(out)
    assert code == 0 and rec["ok"] and rec["steps"] == 85 and rec["checked"] == 86


def test_meta_failure_exit(capsys, tmp_path):
    f = tmp_path / "stuck.ld"
    f.write_text("main = ()")
    assert cli(capsys, "meta", str(f), "--max-steps", "2")[0] == 5


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", "--bogus", "x.ld"])
    assert e.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("main = (Inr (), ())"))
    assert cli(capsys, "run", "-") == (0, "(Inr (), ())\n", "")


def test_console_script_and_module():
    out = subprocess.run([sys.executable, "-m", "destcalc", "run", corpus("unit.ld")],
                         capture_output=True, text=True)
    assert (out.returncode, out.stdout) == (0, "()\n")
