import json
import math

import pytest

from sl2geo.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_circle(tmp_path, capsys):
    svg = tmp_path / "p.svg"
    code, out, _ = run(capsys, "simulate", "--k", "2", "--abc", "1,-2,1", "--t-end", "6.2832",
                       "--out-dir", str(tmp_path), "--svg", str(svg))
    assert code == 0
    rep = json.loads(out)
    assert rep["center"] == [1.0, 1.5]
    assert rep["return_residual"] < 1e-3
    text = svg.read_text()
    assert text.startswith("<?xml") and 'version="1.1"' in text and "1+1.5i" in text
    head = (tmp_path / "geodesic_group.csv").read_text().splitlines()[0]
    assert head == "t,m11,m12,m21,m22,u,v,w"
    assert (tmp_path / "geodesic_proj.csv").read_text().startswith("t,x,y,phi\n")


def test_simulate_vertical_line(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--abc", "1,0,0", "--t-end", "1", "--out-dir", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "geodesic_proj.csv").read_text().splitlines()[1:]
    assert all(abs(float(r.split(",")[1])) < 1e-12 for r in rows)


def test_simulate_zero_warns(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--abc", "0,0,0", "--out-dir", str(tmp_path))
    assert code == 0 and "warning" in err


def test_simulate_modular_overlay(tmp_path, capsys):
    svg = tmp_path / "m.svg"
    code, _, _ = run(capsys, "simulate", "--abc", "1,0,0", "--t-end", "3", "--out-dir", str(tmp_path),
                     "--svg", str(svg), "--modular")
    assert code == 0 and svg.read_text().count("<polyline") > 3


def test_simulate_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        run(capsys, "simulate", "--k", "3", "--abc", "0.3,-1,0.7", "--out-dir", str(tmp_path / sub))
    for name in ("geodesic_group.csv", "geodesic_proj.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "--abc", "1,-2,1", "--k", "2")
    rep = json.loads(out)
    assert code == 0 and rep["H"] == 7 and rep["Delta"] == -1 and rep["C"] == 1.8
    _, out, _ = run(capsys, "invariants", "--abc", "1,0,0")
    rep = json.loads(out)
    assert rep["C"] == 0 and rep["class"] == "Geodesic"
    _, out, _ = run(capsys, "invariants", "--abc", "0,-1,1")
    assert json.loads(out)["class"] == "Fiber"


def test_invariants_uvw_matches_abc(capsys):
    _, a, _ = run(capsys, "invariants", "--k", "3", "--abc", "0,1,0")
    _, b, _ = run(capsys, "invariants", "--k", "3", "--uvw", "0,0.25,0.75")
    assert json.loads(a)["H"] == pytest.approx(json.loads(b)["H"])


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--abc", "0.5,-1,0.8", "--k", "1.5", "--t-end", "5")
    rep = json.loads(out)
    assert code == 0
    assert max(rep["drift_closed_form"].values()) <= 1e-9
    assert max(rep["drift_oracle"].values()) <= 1e-6
    assert rep["oracle_residual"] <= 1e-6


def test_lyapunov(capsys, tmp_path):
    code, out, _ = run(capsys, "lyapunov", "--levels", "0,0.75", "--T", "50", "--out-dir", str(tmp_path))
    reps = json.loads(out)
    assert code == 0 and [r["C"] for r in reps] == [0.0, 0.75]
    assert 0.8 <= reps[0]["lambda"] <= 1.2 and 0.4 <= reps[1]["lambda"] <= 0.6
    assert all(r["target"] == "sqrt(1-C)" for r in reps)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["lyapunov_C0.75.json", "lyapunov_C0.json"]
    code, out, _ = run(capsys, "lyapunov", "--abc", "1,-2,1", "--T", "50")
    assert json.loads(out)["lambda"] <= 0.05


def test_knot(capsys):
    code, out, err = run(capsys, "knot", "cable", "--k", "2", "--abc", "1,-2,1")
    assert code == 0 and json.loads(out) == {"p": 3, "q": 1, "linking": 18}
    assert "warning" in err
    code, out, _ = run(capsys, "knot", "modular", "--matrix", "2,1,1,1")
    rep = json.loads(out)
    assert rep["word"] == "R^1 L^1" and rep["rademacher"] == 0 and rep["form"] == [1, -1, -1]
    assert rep["trace"] == 3 and rep["length"] == pytest.approx(2 * math.acosh(1.5))
    code, _, err = run(capsys, "knot", "cable", "--abc", "1,0,0")
    assert code == 2 and "Delta" in err
    code, _, _ = run(capsys, "knot", "modular", "--matrix", "1,1,0,1")
    assert code == 2


def test_volume(capsys):
    code, out, _ = run(capsys, "volume", "--p", "2", "--q", "3", "--k", "2")
    v = json.loads(out)["volume"]
    assert code == 0 and v == pytest.approx(6.5797, abs=1e-4)
    _, out, _ = run(capsys, "volume", "--gamma2", "--k", "2")
    assert json.loads(out)["volume"] == pytest.approx(6 * v)
    code, _, _ = run(capsys, "volume", "--k", "1")
    assert code == 2


def test_bad_input_exit_codes(capsys, tmp_path):
    assert run(capsys, "simulate", "--k", "0.5")[0] == 2
    assert run(capsys, "simulate", "--abc", "1,x,2")[0] == 2
    assert run(capsys, "simulate", "--g0", "2,0,0,2")[0] == 2
    assert run(capsys, "simulate", "--abc", "3,0,0", "--t-end", "200", "--out-dir", str(tmp_path))[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
