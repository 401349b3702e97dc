import io
import json
import re
import subprocess
import sys

import pytest

from monadrec.cli import EXIT_DATA, EXIT_USAGE, run

from cli_cases import INVOCATIONS, PARALLEL

COMMANDS = {"free", "eq", "check-algebra", "direct-image", "props", "case", "refute", "noncase"}


def invoke(argv):
    out = io.BytesIO()
    code = run(argv, out)
    return code, out.getvalue()


@pytest.mark.parametrize("argv, code", INVOCATIONS, ids=lambda a: " ".join(a) if isinstance(a, list) else str(a))
def test_exit_codes(argv, code):
    got, text = invoke(argv)
    assert got == code, text.decode()
    lines = text.decode().splitlines()
    assert lines[0] == "monadrec " + next(a for a in argv if a in COMMANDS)
    assert re.fullmatch(r"1 check|\d+ checks", lines[-1])


def test_jsonl_records():
    code, text = invoke(["--format", "jsonl", "props", "--theory", "group", "--check", "wpb",
                         "--span", "empty-ab-c"])
    assert code == 1
    rec = json.loads(text)
    assert rec["outcome"] == "Refuted" and rec["witness"]["r"] == "(dot a (inv b))"
    assert list(rec) == sorted(rec)


def test_verified_bound_reported():
    code, text = invoke(["--format", "jsonl", "direct-image", "--theory", "monoid", "--lang",
                         "abstar", "--map", "a->c,b->c", "--bound", "6"])
    rec = json.loads(text)
    assert code == 0 and rec["outcome"] == "Verified" and rec["bounds"]["bound"] == 6


@pytest.mark.parametrize("argv", [
    [],
    ["nosuch"],
    ["props", "--theory", "group", "--check", "wpb"],
    ["case", "nosuch"],
    ["--jobs", "0", "case", "fgfgg"],
    ["props", "--theory", "monoid", "--check", "eta", "--epi-only", "--map", "a->a",
     "--target", "a,b"],
])
def test_usage_errors(argv, capsys):
    code, text = invoke(argv)
    assert code == EXIT_USAGE and text == b""
    assert "usage error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["props", "--theory", "nosuch.thy", "--check", "malcev"],
    ["eq", "--theory", "group", "(dot a", "e"],
    ["direct-image", "--lang", "abstar", "--map", "a->c"],
])
def test_data_errors(argv, capsys):
    assert invoke(argv)[0] == EXIT_DATA
    assert "data error" in capsys.readouterr().err


def test_files_on_disk_take_precedence(tmp_path):
    thy = tmp_path / "mine.thy"
    thy.write_text("name: mine\nops: dot/2\neq: (dot ?x ?y) = (dot ?y ?x)\n")
    code, text = invoke(["eq", "--theory", str(thy), "(dot a b)", "(dot b a)"])
    assert code == 0


def test_bad_file_reports_position(tmp_path, capsys):
    thy = tmp_path / "bad.thy"
    thy.write_text("ops: dot/2\neq: (dot ?x ?y = ?x\n")
    assert invoke(["free", "--theory", str(thy)])[0] == EXIT_DATA
    assert "line 2" in capsys.readouterr().err


def test_timings_go_to_stderr(capsys):
    code, text = invoke(["--timings", "case", "fgfgg"])
    assert b"elapsed" not in text and "elapsed" in capsys.readouterr().err


def test_memory_budget_is_respected():
    env = {"MONADREC_MEMORY_MB": "4096", "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "monadrec.cli", "case", "fgfgg"],
                          capture_output=True, env=env)
    assert proc.returncode == 0


@pytest.mark.parametrize("argv", PARALLEL)
def test_jobs_do_not_change_output(argv):
    base = invoke(argv)
    assert invoke(["--jobs", "2"] + argv) == base
    assert invoke(["--format", "jsonl", "--jobs", "3"] + argv)[1] == \
        invoke(["--format", "jsonl"] + argv)[1]


def test_console_script():
    proc = subprocess.run(["monadrec", "case", "fgfgg"], capture_output=True)
    assert proc.returncode == 0 and proc.stdout.startswith(b"monadrec case\n")
