from __future__ import annotations

import json

import numpy as np
import pytest

from mslab.cli import main
from mslab.fieldio import read_field


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fields(tmp_path, capsys):
    paths = []
    for i in range(2):
        p = str(tmp_path / f"f{i}.bin")
        assert main(["make-field", "--n", "32", "--length", "8", "--index", str(i), "--out", p]) == 0
        paths.append(p)
    capsys.readouterr()
    return paths


def test_operator_subcommands(tmp_path, capsys, fields):
    out = str(tmp_path / "s.bin")
    code, text, _ = run(capsys, "sq-mult", "--f", fields[0], "--f", fields[1], "--out", out)
    assert code == 0
    summary = json.loads(text)
    assert set(summary) == {"l2", "linf", "config_hash"}
    assert read_field(out).grid.n == 32
    code, text2, _ = run(capsys, "sq-kernel", "--f", fields[0], "--f", fields[1], "--npo", "4")
    code, text3, _ = run(capsys, "sq-mult", "--f", fields[0], "--f", fields[1], "--npo", "4")
    assert json.loads(text2)["l2"] == pytest.approx(json.loads(text3)["l2"], rel=1e-6)
    code, text, _ = run(capsys, "commutator", "--f", fields[0], "--f", fields[1],
                        "--b", fields[0], "--b", "-")
    assert code == 0 and json.loads(text)["l2"] > 0


def test_annulus_subcommands(capsys):
    code, text, _ = run(capsys, "bjk", "--j", "1", "--k", "2", "--mesh", "8")
    assert code == 0 and json.loads(text)["value"] > 0
    code, text, _ = run(capsys, "ajk", "--mesh", "8", "--x", "0.1", "--xbar", "0.1")
    assert json.loads(text)["value"] == 0


def test_maximal_weights_orlicz(capsys, fields):
    for op in ("hl", "mp", "mdelta", "sharp", "orlicz"):
        code, text, _ = run(capsys, "maximal", "--op", op, "--f", fields[0], "--f", fields[1])
        assert code == 0
    code, text, _ = run(capsys, "weights", "--family", "power:a=-0.5", "--ap", "2")
    rep = json.loads(text)
    assert rep["characteristic"] > 1 and "side" in rep["argmax_window"]
    code, text, _ = run(capsys, "orlicz-eval", "--kind", "phi", "--alpha", "2", "--values", "1", "0")
    assert json.loads(text)["value"] == [1.0, 0.0]
    code, text, _ = run(capsys, "orlicz-norm", "--values", "3", "3", "3")
    assert json.loads(text)["norm"] == pytest.approx(3.0, rel=1e-8)


def test_check_symbol(capsys):
    code, text, _ = run(capsys, "check-symbol", "--family", "gauss_bump", "--cond", "eq13", "--s", "2")
    assert code == 0
    rep = json.loads(text)
    assert rep["condition_id"] == "eq13" and rep["entries"]


def test_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--theorem", "T11i", "--config", str(tmp_path / "missing.json"))
    assert code == 2 and "not found" in err
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"theorem_id": "T11i", "exponents": {"p_list": [1.0, 2.0]}}))
    code, _, err = run(capsys, "verify", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 3 and "requires" in err
    code, _, _ = run(capsys, "sq-mult", "--f", str(tmp_path / "nope.bin"), "--f", str(tmp_path / "nope.bin"))
    assert code == 2


def test_verify_and_report(tmp_path, capsys):
    out = tmp_path / "r"
    code, text, _ = run(capsys, "verify", "--theorem", "P31scale", "--count", "2", "--out", str(out))
    assert code == 0
    for name in ("report.json", "report.csv", "ratios.dat"):
        assert (out / name).exists()
    code, text, _ = run(capsys, "report", str(out))
    assert json.loads(text)["summary"]["count"] == 2
