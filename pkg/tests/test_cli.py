"""The command-line surface: exit codes, JSON reports, figure rendering."""

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from coamoeba_atlas import PlaneConfig, RolledValue, TorusPoint
from coamoeba_atlas.cli import main


def run_main(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_default_passes(capsys):
    code, out, _ = run_main(capsys, "validate")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "coamoeba-atlas/1"
    assert payload["passed"] is True


def test_validate_degenerate_config_exits_1(tmp_path, capsys):
    bad = PlaneConfig(a=1.6 + 1.2j, k=0.5 + 0.0j)
    path = tmp_path / "bad.json"
    path.write_text(bad.to_json())
    code, out, _ = run_main(capsys, "validate", "--config", str(path))
    assert code == 1
    assert json.loads(out)["checks"]["Im k != 0"] is False


def test_missing_config_exits_2(capsys):
    code, _, err = run_main(capsys, "validate", "--config", "/nonexistent.json")
    assert code == 2
    assert "cannot read config" in err


def test_malformed_config_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_main(capsys, "validate", "--config", str(path))
    assert code == 2


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_invert_regular_roundtrip(capsys):
    pt = TorusPoint(1.0 + 1.0j, 2.0 - 1.0j)
    c = RolledValue.from_point(pt)
    code, out, _ = run_main(capsys, "invert", *(str(t) for t in c.angles()))
    assert code == 0
    payload = json.loads(out)
    assert payload["classification"] == "regular"
    x = complex(*payload["preimage"]["x"])
    y = complex(*payload["preimage"]["y"])
    assert abs(x - pt.x) < 1e-9
    assert abs(y - pt.y) < 1e-9


def test_invert_non_value(capsys):
    q = np.pi / 4
    code, out, _ = run_main(capsys, "invert", str(q), str(q), str(q), "0.3")
    assert code == 0
    assert json.loads(out)["classification"] == "non_value"


def test_invert_critical_real_stratum(capsys):
    code, out, _ = run_main(capsys, "invert", "0", "0", "0", "0.3")
    assert code == 0
    payload = json.loads(out)
    assert payload["classification"] == "critical"
    assert payload["arcs"] == 5


def test_from_p_fields(capsys):
    code, out, _ = run_main(capsys, "from-p", "--", "-1.5", "-1.0")
    assert code == 0
    payload = json.loads(out)
    assert payload["arcs"] == 5
    assert sorted(payload["marked_angles"]) == ["inf", "z1", "z2", "z3", "z4"]
    assert all(0.0 <= t < np.pi for t in payload["rolled_angles"])
    flat = [n for block in payload["cyclic_order"] for n in block]
    assert sorted(flat) == ["inf", "z1", "z2", "z3", "z4"]


def test_monodromy_command(capsys):
    code, out, _ = run_main(capsys, "monodromy")
    assert code == 0
    payload = json.loads(out)
    assert payload["transitive"] is True
    assert len(payload["loops"]) == 5
    assert all(loop["orientation_reversing"] for loop in payload["loops"])


def test_render_deterministic(tmp_path, capsys):
    out1 = tmp_path / "fig1.svg"
    out2 = tmp_path / "fig2.svg"
    for out in (out1, out2):
        code, _, _ = run_main(capsys, "render", "cyclic-diagram",
                              "--out", str(out))
        assert code == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    assert b1.startswith(b"<svg")
    assert b1.rstrip().endswith(b"</svg>")


def test_render_rejects_unknown_kind(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["render", "sombrero"])
    assert exc.value.code == 2


def test_verify_all_quick_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, err = run_main(capsys, "verify-all", "--level", "quick",
                            "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema"] == "coamoeba-atlas/1"
    assert payload["level"] == "quick"
    assert payload["passed"] is True
    # every criterion appears exactly once
    assert sorted(c["criterion"] for c in payload["checks"]) == list(range(1, 12))
    assert all(c["status"] == "pass" for c in payload["checks"])
    # runtimes are omitted by default so the bytes are stable
    assert all(c["runtime_s"] is None for c in payload["checks"])
    # report JSON round-trips losslessly
    assert json.loads(json.dumps(payload)) == payload
    # per-criterion lines go to stderr
    assert err.count("criterion") == 11


def test_entry_point_runs():
    exe = shutil.which("coamoeba-atlas")
    if exe is None:
        cmd = [sys.executable, "-m", "coamoeba_atlas.cli"]
    else:
        cmd = [exe]
    r = subprocess.run([*cmd, "validate"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["passed"] is True
