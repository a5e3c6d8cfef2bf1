import csv
import json
import subprocess
import sys

import pytest

from swewaves import cli
from swewaves.curves import a_max

from scenarios import FV_OFFSET, RS_FIXTURES, SS_FIXTURES, rs_fixture


def _write(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg), encoding="utf-8")
    return str(path)


def _rs_build(name, **extra):
    Um, hm, a1 = RS_FIXTURES[name]
    cfg = {"mode": "interact_rs", "g": 1.0,
           "build": {"U_mid": [Um.u, Um.h, Um.a], "h_minus": hm, "a1": a1}}
    cfg.update(extra)
    return cfg


def _rs_explicit(name, **extra):
    scn = rs_fixture(name)
    cfg = {"mode": "interact_rs", "g": 1.0,
           **{k: [U.u, U.h, U.a] for k, U in (("U_minus", scn.U_minus), ("U_mid", scn.U_mid),
                                               ("U_plus", scn.U_plus))}}
    cfg.update(extra)
    return cfg


def _run(tmp_path, cfg, out="out"):
    return cli.main(["run", _write(tmp_path, cfg), "--out", str(tmp_path / out)])


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_curves_mode_rarefaction_row(tmp_path):
    assert _run(tmp_path, {"mode": "curves", "U0": [0, 1, 0], "g": 1, "n": 13, "h_max": 1.5}) == 0
    rows = _rows(tmp_path / "out" / "curves.csv")
    assert list(rows[0]) == ["param", "u", "h", "a", "branch"]
    w1 = [r for r in rows if r["branch"] == "W1" and float(r["h"]) == 0.25]
    assert len(w1) == 1 and float(w1[0]["u"]) == pytest.approx(1.0, abs=1e-15)


def test_interact_rs_case1_fan(tmp_path):
    assert _run(tmp_path, _rs_build("Case1")) == 0
    fan = json.loads((tmp_path / "out" / "fan.json").read_text())
    assert fan["case"] == "Case1"
    waves = [w for w in fan["waves"] if w["family"] in ("S0", "S1", "R2")]
    assert [w["family"] for w in waves] == ["S0", "S1", "R2"]
    rows = _rows(tmp_path / "out" / "fan.csv")
    assert list(rows[0]) == cli.FAN_HEADER


def test_interact_ss_emits_timing(tmp_path):
    Ul, hm, a1 = SS_FIXTURES["Case1_1"]
    cfg = {"mode": "interact_ss", "g": 1.0, "build": {"U_minus": [Ul.u, Ul.h, Ul.a], "h_mid": hm, "a1": a1}}
    assert _run(tmp_path, cfg) == 0
    fan = json.loads((tmp_path / "out" / "fan.json").read_text())
    assert fan["case"] == "Case1_1" and fan["timing"][0]["wave"] == "incident"


def test_fv_check_report(tmp_path):
    cfg = _rs_build("Case1", mode="fv_check", x1=0.0, x2=FV_OFFSET, fv={"cells": 2000})
    assert _run(tmp_path, cfg) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["relative"] < 0.02
    lines = (tmp_path / "out" / "field.csv").read_text().splitlines()
    assert lines[0].startswith("# scenario=") and lines[1] == "x,h,u,a" and len(lines) == 2002


def test_ode_trace_backward(tmp_path):
    # 1-fan with u + 2c = 1: head (0, 0.25) has speed -0.5, tail (-1, 1)
    cfg = {"mode": "ode_trace", "g": 1.0, "side": "BackwardS1inR1", "samples": 20,
           "anchor": [-0.5, 1.0], "center": [0.0, 0.0], "behind_state": [0.2, 1.5, 0.0],
           "fan_head": [0.0, 0.25, 0.0], "fan_tail": [-1.0, 1.0, 0.0]}
    assert _run(tmp_path, cfg) == 0
    verdict = json.loads((tmp_path / "out" / "verdict.json").read_text())
    assert verdict["verdict"]["kind"] == "CrossedAt"
    rows = _rows(tmp_path / "out" / "trajectory.csv")
    assert list(rows[0]) == ["t", "x", "h", "u"] and len(rows) == 20


def test_ode_trace_transmitted(tmp_path):
    cfg = _rs_build("Case1", mode="ode_trace", side="S1inTransmittedR2", samples=10)
    assert _run(tmp_path, cfg) == 0
    verdict = json.loads((tmp_path / "out" / "verdict.json").read_text())
    assert verdict["envelope"]["t_e"] == pytest.approx(5.867327, abs=1e-6)


def test_riemann_mode(tmp_path):
    scn = rs_fixture("Case4")
    cfg = {"mode": "riemann", "g": 1.0, "U_left": [scn.U_minus.u, scn.U_minus.h, scn.U_minus.a],
           "U_right": [scn.U_plus.u, scn.U_plus.h, scn.U_plus.a]}
    assert _run(tmp_path, cfg) == 0
    assert json.loads((tmp_path / "out" / "fan.json").read_text())["construction"] == "sub"


@pytest.mark.parametrize("mode_cfg", [
    {"mode": "curves", "U0": [0, 1, 0], "g": 1},
    _rs_build("Case3_2"),
])
def test_output_is_byte_identical(tmp_path, mode_cfg):
    assert _run(tmp_path, mode_cfg, "a") == 0
    assert _run(tmp_path, mode_cfg, "b") == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
        assert b"\r\n" not in f.read_bytes()


def test_ascending_step_is_unsupported(tmp_path, capsys):
    cfg = {"mode": "riemann", "g": 1.0, "U_left": [1, 1, 0], "U_right": [1, 1, 0.5]}
    assert _run(tmp_path, cfg) == 2
    assert "unsupported" in capsys.readouterr().err


def test_invalid_scenario_exits_one(tmp_path, capsys):
    cfg = _rs_explicit("Case1")
    cfg["U_mid"][0] += 1e-3
    assert _run(tmp_path, cfg) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_malformed_json_reports_position(tmp_path, capsys):
    path = _write(tmp_path, '{"mode": "curves",\n  "U0": [0, 1, 0,]\n}')
    assert cli.main(["run", path]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


@pytest.mark.parametrize("cfg, field", [
    ({"mode": "nope"}, "mode"),
    ({"mode": "curves"}, "U0"),
    ({"mode": "curves", "U0": [0, 1]}, "U0"),
    ({"mode": "curves", "U0": [0, 1, 0], "g": -1}, "g"),
])
def test_bad_fields_are_named(tmp_path, capsys, cfg, field):
    assert _run(tmp_path, cfg) == 1
    assert f"'{field}'" in capsys.readouterr().err


def test_gravity_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SWE_GRAVITY", "4.0")
    assert _run(tmp_path, {"mode": "curves", "U0": [0, 1, 0], "n": 13, "h_max": 1.5}) == 0
    rows = _rows(tmp_path / "out" / "curves.csv")
    w1 = [r for r in rows if r["branch"] == "W1" and float(r["h"]) == 0.25][0]
    # u = 2 sqrt(g) (1 - sqrt(h)) with g = 4
    assert float(w1["u"]) == pytest.approx(2.0, abs=1e-14)


def test_validate_consistent(tmp_path, capsys):
    assert cli.main(["validate", _write(tmp_path, _rs_explicit("Case1"))]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_validate_no_stationary_contact(tmp_path, capsys):
    cfg = _rs_explicit("Case1")
    cfg["U_plus"][2] = a_max(rs_fixture("Case1").U_mid, 1.0) + 0.1
    assert cli.main(["validate", _write(tmp_path, cfg)]) == 1
    assert "no stationary contact" in capsys.readouterr().out


def test_validate_names_residual(tmp_path, capsys):
    cfg = _rs_explicit("Case1")
    cfg["U_mid"][0] += 1e-3
    assert cli.main(["validate", _write(tmp_path, cfg)]) == 1
    out = capsys.readouterr().out
    assert "off the R2 curve" in out and "residual 1.000e-03" in out


def test_module_entry_point(tmp_path):
    path = _write(tmp_path, _rs_explicit("Case1"))
    proc = subprocess.run([sys.executable, "-m", "swewaves", "validate", path], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "ok"
