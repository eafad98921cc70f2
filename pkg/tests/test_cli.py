from __future__ import annotations

import json
import subprocess
import sys

import pytest

from mbhash import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_thresholds_json(capsys):
    code, out, _ = run(capsys, "thresholds", "--format", "json")
    assert code == 0
    data = json.loads(out)
    bell = next(r for r in data["thresholds"] if r["target"] == "bell" and r["convention"] == "paper_product")
    assert round(bell["tolerable_noise"], 4) == 0.0688
    assert round(data["f_min"], 4) == 0.8107
    assert {(r["target"], r["convention"]) for r in data["thresholds"]} == {
        (t, c) for t in ("bell", "cluster1d", "cluster2d") for c in ("paper_product", "exact")
    }
    # sorted keys, so the text is reproducible
    assert out == cli.dump_json(json.loads(out))


def test_thresholds_cluster1d(capsys):
    code, out, _ = run(capsys, "thresholds", "--target", "cluster1d", "--convention", "exact")
    assert code == 0
    (report,) = json.loads(out)["thresholds"]
    assert report["q_min"] == pytest.approx(0.9204, abs=1e-3)


def test_thresholds_csv(capsys):
    code, out, _ = run(capsys, "thresholds", "--format", "csv", "--target", "bell")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "target,convention,q_min,p_min,tolerable_noise"
    assert len(lines) == 3


def test_malformed_target_writes_nothing(capsys, tmp_path):
    dest = tmp_path / "out.json"
    code, out, err = run(capsys, "thresholds", "--target", "ghz", "--output", str(dest))
    assert code == 2 and not dest.exists()
    assert "invalid choice" in err


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "t.json"
    code, out, _ = run(capsys, "thresholds", "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["thresholds"]


def test_yield_curve_csv(capsys):
    code, out, _ = run(capsys, "yield-curve", "--target", "bell", "--q-from", "0.8", "--q-to", "1.0", "--steps", "41")
    assert code == 0
    assert "\r" not in out and out.endswith("\n")
    lines = out.splitlines()
    assert lines[0] == "q,raw_yield,clamped_yield"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 41 and rows[0][0] == 0.8 and rows[-1][0] == 1.0
    assert rows[-1][1] == 1.0 and rows[-1][2] == 1.0
    signs = [r[1] > 0 for r in rows]
    assert sum(a != b for a, b in zip(signs, signs[1:])) == 1
    assert all(r[2] == max(r[1], 0.0) for r in rows)
    # every number carries at most 10 significant digits
    for ln in lines[1:]:
        for field in ln.split(","):
            digits = field.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
            assert len(digits) <= 10


def test_yield_curve_value_at_095(capsys):
    code, out, _ = run(capsys, "yield-curve", "--q-from", "0.9", "--q-to", "0.95", "--steps", "2", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][-1]
    assert row["q"] == 0.95
    assert row["raw_yield"] == pytest.approx(0.5066208317, abs=1e-10)


@pytest.mark.parametrize(
    "argv",
    [
        ("yield-curve", "--q-from", "0.99", "--q-to", "0.9"),
        ("yield-curve", "--steps", "1"),
        ("yield-curve", "--q-from", "1.5"),
        ("simulate", "--N", "64"),
        ("bogus",),
        (),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_simulate_perfect(capsys):
    code, out, _ = run(capsys, "simulate", "--N", "64", "--seed", "1", "--trials", "100", "--p", "1", "--q", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["decode_success_rate"] == 1.0
    assert rep["mean_output_fidelity"] == 1.0
    assert rep["predicted_output_fidelity"] == 1.0
    for key in ("config", "trials", "yield_empirical", "yield_asymptotic"):
        assert key in rep


def test_simulate_byte_identical(capsys):
    argv = ("simulate", "--N", "48", "--seed", "5", "--trials", "8", "--F", "0.95", "--p", "0.99")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, other, _ = run(capsys, *argv[:4], "6", *argv[5:])
    assert other != first


def test_simulate_infeasible(capsys):
    code, out, _ = run(capsys, "simulate", "--N", "64", "--seed", "1", "--F", "0.78", "--delta", "0")
    assert code == 3
    rep = json.loads(out)
    assert rep["error"] == "infeasible"
    assert rep["reason"] == "below hashing threshold"


def test_config_file_defaults_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nN = 32\nseed = 4\ntrials = 3\nF = 0.97\n")
    code, out, _ = run(capsys, "--config", str(cfg), "simulate")
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["N"] == 32 and rep["trials"] == 3
    code, out, _ = run(capsys, "--config", str(cfg), "simulate", "--trials", "2")
    assert json.loads(out)["trials"] == 2


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign here\n")
    code, _, err = run(capsys, "--config", str(cfg), "thresholds")
    assert code == 2 and "config" in err
    code, _, _ = run(capsys, "--config", str(tmp_path / "missing.cfg"), "thresholds")
    assert code == 2


def test_rounded():
    assert cli.rounded({"x": 0.12345678901234, "n": 3, "ok": True}) == {"x": 0.123456789, "n": 3, "ok": True}


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mbhash.cli", "thresholds", "--target", "bell", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("target,convention")
