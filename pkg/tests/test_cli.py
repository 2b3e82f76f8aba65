from __future__ import annotations

import csv
import io
import json

import pytest

from nhvortex import cli
from nhvortex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_phase_diagram_table(capsys):
    code, out, _ = run(capsys, "phase-diagram", "--n", "8", "--j0", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["k_index", "k_over_pi", "branch", "delta_hop", "big_delta", "kind"]
    red = [r for r in rows if float(r["k_over_pi"]) == 2.0]
    assert red and all(abs(float(r["big_delta"])) == 1.0 for r in red)
    keys = [(int(r["k_index"]), float(r["delta_hop"])) for r in rows]
    assert keys == sorted(keys)


def test_phase_diagram_nesting(capsys):
    _, out4, _ = run(capsys, "phase-diagram", "--n", "4")
    _, out8, _ = run(capsys, "phase-diagram", "--n", "8")

    def rows(text):
        return {(r["k_over_pi"], r["branch"], r["delta_hop"], r["big_delta"]) for r in csv.DictReader(io.StringIO(text))}

    assert rows(out4) <= rows(out8)


def test_phase_diagram_writes_both_formats(tmp_path, capsys):
    out = tmp_path / "diagram.csv"
    code, _, _ = run(capsys, "phase-diagram", "--n", "4", "--out", str(out))
    assert code == 0
    doc = json.loads((tmp_path / "diagram.json").read_text())
    assert doc["schema_version"] == 1
    assert len(doc["rows"]) == len(out.read_text().splitlines()) - 1


def test_phase_diagram_odd_n(capsys):
    code, _, err = run(capsys, "phase-diagram", "--n", "3")
    assert code == 1 and "ODD_N" in err


@pytest.mark.parametrize("name, coef", [("fig4b", -1), ("fig4f", 2)])
def test_berry_phase_bundled(capsys, name, coef):
    code, out, _ = run(capsys, "berry-phase", "--loop", name, "--format", "doc", "--samples", "1024")
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficient"] == coef == doc["predicted_coefficient"]
    assert doc["convergence"]["samples"] == [1024, 2048]
    assert doc["samples"] == 1024


def test_berry_phase_table_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "berry-phase", "--loop", "fig4d", "--samples", "512", "--out", str(a))
    run(capsys, "berry-phase", "--loop", "fig4d", "--samples", "512", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert "coefficient            1" in a.read_text()


def test_berry_phase_degenerate_loop(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"schema_version": 1, "kind": "circle", "space": "pauli", "center": [0, 1, 1], "normal": [0, 0, 1], "radius": 0, "samples": 128}))
    code, out, err = run(capsys, "berry-phase", "--loop", str(f))
    assert code == 1 and out == "" and "INVALID_LOOP" in err


def test_berry_phase_ep_proximity(capsys, tmp_path):
    f = tmp_path / "near.json"
    f.write_text(json.dumps({"schema_version": 1, "kind": "circle", "space": "pauli", "center": [0, 1.05, 1], "normal": [0, 0, 1], "radius": 0.1, "samples": 128}))
    code, _, err = run(capsys, "berry-phase", "--loop", str(f))
    assert code == 1 and "EP_PROXIMITY" in err and "sample index" in err


def test_berry_phase_not_quantized_warning(capsys, monkeypatch):
    # the default EL margin keeps admissible loops well inside 1e-3, so the
    # warning path is exercised by tightening the cutoff instead
    monkeypatch.setattr(cli, "NOT_QUANTIZED_TOL", 1e-12)
    code, out, err = run(capsys, "berry-phase", "--loop", "fig4d", "--samples", "256")
    assert code == 0 and "NOT_QUANTIZED" in err and "coefficient" in out


def test_filaments(capsys):
    code, out, _ = run(capsys, "filaments", "--j0", "2", "--format", "doc")
    doc = json.loads(out)
    assert code == 0 and len(doc["filaments"]) == 4
    assert doc["filaments"][0]["anchor"] == [0.0, 2.0, 0.0]
    code, out, _ = run(capsys, "filaments", "--space", "pauli")
    assert code == 0 and len(out.splitlines()) == 3


def test_eig(capsys):
    code, out, _ = run(capsys, "eig", "--delta", "0.5", "--big-delta", "0.3", "--format", "doc")
    doc = json.loads(out)
    assert code == 0 and doc["real_spectrum"] is True
    pi_mode = [m for m in doc["modes"] if m["k_over_pi"] == 1.0][0]
    assert pi_mode["eps_re"] == pytest.approx(0.4)


def test_verify_pass_and_determinism(capsys):
    code1, out1, _ = run(capsys, "verify", "--seed", "42", "--size", "8")
    code2, out2, _ = run(capsys, "verify", "--seed", "42", "--size", "8")
    assert code1 == 0 and out1 == out2
    assert "FAIL" not in out1


def test_verify_threshold_override(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "42", "--size", "4", "--threshold", "1e-30")
    assert code == 2 and "FAIL" in out
