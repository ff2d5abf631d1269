import json
import subprocess
import sys

import numpy as np
import pytest

from qface.cli import main, parse_ints, parse_matrix
from qface.errors import ConfigError
from qface.pgm import write_pgm


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_det_fixture(capsys):
    assert run(["det", "--matrix", "1 0; 0 2", "--n", "2"], capsys)[:2] == (0, "2\n")


def test_det_literal(capsys):
    assert run(["det", "--matrix", "2,1;1,2", "--n", "2", "--rotation", "literal"], capsys)[1] == "3\n"


def test_trace(capsys):
    assert run(["trace", "--diag", "3,5"], capsys)[1] == "8\n"


def test_selftest(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0 and "FAIL" not in out and "all passed" in out


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_error_exit_codes(capsys, tmp_path):
    assert run(["det", "--matrix", "1 2"], capsys)[0] == 4
    assert run(["det", "--matrix", "1 0; 0 9", "--n", "2"], capsys)[0] == 1
    assert run(["sweep", "--qft", "30"], capsys)[0] == 5
    assert run(["ghost", str(tmp_path / "missing.pgm"), "--out", str(tmp_path / "o.pgm")], capsys)[0] == 3
    (tmp_path / "bad.cfg").write_text("wat=1\n")
    assert run(["run", "--config", str(tmp_path / "bad.cfg")], capsys)[0] == 4


def test_ghost_command(capsys, tmp_path):
    write_pgm(tmp_path / "f.pgm", np.full((4, 4), 200, np.uint8))
    code, out, _ = run(["ghost", str(tmp_path / "f.pgm"), "--out", str(tmp_path / "g.pgm"), "--frames", "5"], capsys)
    assert code == 0 and (tmp_path / "g.txt").exists()


def test_run_config_and_seed_env(capsys, tmp_path, monkeypatch):
    (tmp_path / "c.cfg").write_text("frames=20\nseed=1\n")
    monkeypatch.setenv("QFACE_SEED", "77")
    code, out, _ = run(["run", "--config", str(tmp_path / "c.cfg"), "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["seed"] == 77 and report["config"]["frames"] == 20
    code, _, _ = run(["run", "--config", str(tmp_path / "c.cfg"), "--seed", "5", "--out", str(tmp_path / "p")], capsys)
    assert json.loads((tmp_path / "p" / "report.json").read_text())["seed"] == 5


def test_sweep_to_file(capsys, tmp_path):
    code, _, _ = run(["sweep", "--qft", "1..3", "--trace-n", "2..3", "--det-n", "2", "--out", str(tmp_path / "s.csv")], capsys)
    assert code == 0 and len((tmp_path / "s.csv").read_text().splitlines()) == 1 + 3 + 2 + 1


def test_corpus_command(capsys, tmp_path):
    code, out, _ = run(["corpus", "--out", str(tmp_path), "--count", "2"], capsys)
    assert code == 0 and len(out.splitlines()) == 2


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "qface.cli", "trace", "--diag", "1,1,1,1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout == "4\n"


def test_parsers():
    np.testing.assert_array_equal(parse_matrix("1 2; 3 4"), [[1, 2], [3, 4]])
    assert parse_matrix("1 1j; -1j 1").dtype == complex
    assert parse_ints("2..4") == (2, 3, 4) and parse_ints("1,5") == (1, 5)
    with pytest.raises(ConfigError):
        parse_ints("a..b")
