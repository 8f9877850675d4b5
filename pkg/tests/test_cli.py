import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from qrseal.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, EXIT_UNDECODABLE, main

DATA = Path(__file__).parent / "data"
KEY = "exam-cell-2024"


@pytest.fixture
def sealed(tmp_path):
    prefix = tmp_path / "xyz"
    assert main(["seal", "--record", str(DATA / "xyz.rec"), "--key", KEY, "--out", str(prefix), "--scale", "2"]) == 0
    return sorted(tmp_path.glob("xyz-*.pbm"))


def test_seal_writes_numbered_files(sealed, capsys):
    assert [p.name for p in sealed] == ["xyz-1.pbm", "xyz-2.pbm"]
    assert all(p.read_bytes().startswith(b"P1\n") for p in sealed)


def test_verify_match(sealed, capsys):
    code = main(["verify", "--record", str(DATA / "xyz.rec"), "--key", KEY, *map(str, sealed)])
    assert code == EXIT_OK
    assert "verdict: match" in capsys.readouterr().out


def test_verify_tampered(sealed, capsys):
    code = main(["verify", "--record", str(DATA / "xyz_tampered.rec"), "--key", KEY, *map(str, sealed)])
    out = capsys.readouterr().out
    assert code == EXIT_MISMATCH
    assert "verdict: mismatch" in out
    diff_lines = [line for line in out.splitlines() if line.startswith("subjects")]
    assert diff_lines == ["subjects[1].marks: sealed 43, printed 45"]


def test_verify_wrong_key(sealed, capsys):
    code = main(["verify", "--record", str(DATA / "xyz.rec"), "--key", "wrong", *map(str, sealed)])
    assert code == EXIT_UNDECODABLE


def test_verify_missing_part(sealed):
    assert main(["verify", "--record", str(DATA / "xyz.rec"), "--key", KEY, str(sealed[0])]) == EXIT_UNDECODABLE


def test_unseal_round_trip(sealed, tmp_path):
    out = tmp_path / "back.rec"
    assert main(["unseal", "--key", KEY, "--out", str(out), *map(str, sealed[::-1])]) == EXIT_OK
    assert out.read_bytes() == (DATA / "xyz.rec").read_bytes()


def test_inspect(sealed, capsys):
    assert main(["inspect", str(sealed[0])]) == EXIT_OK
    out = capsys.readouterr().out
    assert "version: 10" in out and "ec level: L" in out and "mask: " in out
    assert "codewords: 346 (274 data, 72 ec)" in out


def test_inspect_garbage(tmp_path):
    bad = tmp_path / "bad.pbm"
    bad.write_bytes(b"P1\n3 3\n000000000")
    assert main(["inspect", str(bad)]) == EXIT_UNDECODABLE


def test_freq(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"AAB")
    b.write_bytes(b"CC")
    assert main(["freq", "--in", str(a), "--compare", str(b)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 257
    assert lines[65] == "65,2" and lines[66] == "66,1" and lines[0] == "0,0"
    assert lines[-1] == "distance,1.000000"


def test_freq_empty_compare(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"x")
    b.write_bytes(b"")
    assert main(["freq", "--in", str(a), "--compare", str(b)]) == EXIT_INPUT


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["seal", "--record", "x"],
        ["seal", "--record", "x", "--key", "k", "--out", "o", "--scale", "0"],
        ["seal", "--record", "x", "--key", "k", "--out", "o", "--version", "11"],
        ["verify", "--record", "r", "--key", "k"],
        ["inspect", "--nope", "x"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_INPUT


def test_missing_and_malformed_record(tmp_path):
    missing = tmp_path / "none.rec"
    assert main(["seal", "--record", str(missing), "--key", "k", "--out", str(tmp_path / "o")]) == EXIT_INPUT
    bad = tmp_path / "bad.rec"
    bad.write_text("SUBJ X 70 50\n")
    assert main(["seal", "--record", str(bad), "--key", "k", "--out", str(tmp_path / "o")]) == EXIT_INPUT


def test_seal_is_deterministic(tmp_path):
    for run in ("a", "b"):
        argv = ["seal", "--record", str(DATA / "def.rec"), "--key", KEY, "--out", str(tmp_path / run), "--png"]
        assert main(argv) == EXIT_OK
    for suffix in ("-1.pbm", "-2.pbm", "-1.png", "-2.png"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_forced_profile_flags(tmp_path, capsys):
    argv = ["seal", "--record", str(DATA / "xyz.rec"), "--key", KEY, "--out", str(tmp_path / "f"),
            "--level", "M", "--version", "8", "--mask", "2", "--scale", "1", "--quiet-zone", "2"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert "version 8-M mask 2" in out
    files = sorted(tmp_path.glob("f-*.pbm"))
    assert main(["unseal", "--key", KEY, "--out", str(tmp_path / "r.rec"), *map(str, files)]) == EXIT_OK
    assert (tmp_path / "r.rec").read_bytes() == (DATA / "xyz.rec").read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qrseal", "inspect", str(tmp_path / "nope.pbm")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_INPUT
    assert "cannot read" in proc.stderr


@pytest.mark.skipif(shutil.which("qrseal") is None, reason="console script not installed")
def test_console_script_help():
    proc = subprocess.run(["qrseal", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "seal" in proc.stdout
