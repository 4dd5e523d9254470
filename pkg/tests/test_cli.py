"""Command-line front end: config validation, output schemas, exit codes,
and byte-level determinism."""

import json
import math

import numpy as np
import pytest

from exospin import CONSTANTS, budget_from_dict
from exospin.cli import main

K = CONSTANTS


def write_config(tmp_path, body, name="run.ini"):
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return str(p)


def base_config(tmp_path, out, extra_run="", mc="samples = 131072\nseed = 4\ntarget_rel_se = 0.2\n"):
    return write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um

[mc]
{mc}
[run]
kind = v12_13
lambda_um = 5
out_dir = {out}
{extra_run}
""")


# ------------------------------------------------------------- field

def test_field_writes_json(tmp_path):
    out = tmp_path / "out"
    code = main(["field", base_config(tmp_path, out)])
    assert code == 0
    payload = json.loads((out / "field.json").read_text())
    assert payload["amplitude_per_coupling_T"] > 0
    assert payload["flagged"] is False
    assert payload["seed"] == 4
    assert len(payload["per_phase"]) == 8
    assert payload["kind"] == "v12_13"


def test_field_byte_identical_across_thread_counts(tmp_path, monkeypatch):
    blobs = []
    for threads, sub in (("1", "a"), ("5", "b")):
        monkeypatch.setenv("EXOSPIN_THREADS", threads)
        out = tmp_path / sub
        assert main(["field", base_config(tmp_path, out, )]) == 0
        blobs.append((out / "field.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_field_zero_lambda_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um

[run]
kind = v12_13
lambda_um = 0
out_dir = {tmp_path}
""")
    assert main(["field", cfg]) == 2
    assert "lambda" in capsys.readouterr().err


def test_unknown_key_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um
d_nv_nm = 100

[run]
kind = v12_13
lambda_um = 5
out_dir = {tmp_path}
""")
    assert main(["field", cfg]) == 2
    assert "d_nv_nm" in capsys.readouterr().err


def test_unknown_kind_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um

[run]
kind = v99
lambda_um = 5
out_dir = {tmp_path}
""")
    assert main(["field", cfg]) == 2
    assert "v99" in capsys.readouterr().err


def test_geometry_overrides_change_result(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["field", base_config(tmp_path, out_a)]) == 0
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um
d_gap_um = 2.0

[mc]
samples = 131072
seed = 4
target_rel_se = 0.2

[run]
kind = v12_13
lambda_um = 5
out_dir = {out_b}
""", name="override.ini")
    assert main(["field", cfg]) == 0
    a = json.loads((out_a / "field.json").read_text())["amplitude_per_coupling_T"]
    b = json.loads((out_b / "field.json").read_text())["amplitude_per_coupling_T"]
    assert b < a


# ------------------------------------------------------------- exclusion

def exclusion_config(tmp_path, out, presets, t_s=None, name="ex.ini"):
    t_line = f"t_s = {t_s}" if t_s else ""
    return write_config(tmp_path, f"""
[geometry]
preset = {presets}

[mc]
samples = 131072
seed = 9
target_rel_se = 0.3

[run]
kind = v12_13
lambda_grid = 0.5,50,1
{t_line}
out_dir = {out}
""", name=name)


def test_exclusion_three_presets(tmp_path):
    out = tmp_path / "out"
    cfg = exclusion_config(tmp_path, out, "unpolarized-50um, unpolarized-5um, unpolarized-0.5um")
    # exit 3 is allowed: far-off-target points may stay above the 5%
    # flagging threshold within the configured sample budget
    assert main(["exclusion", cfg]) in (0, 3)
    files = sorted(p.name for p in out.glob("exclusion_*.csv"))
    assert files == sorted([
        "exclusion_v12_13_unpolarized-0.5um.csv",
        "exclusion_v12_13_unpolarized-5um.csv",
        "exclusion_v12_13_unpolarized-50um.csv",
    ])
    for f in out.glob("exclusion_*.csv"):
        lines = f.read_text().splitlines()
        assert lines[0] == "lambda_m,f_min,f_min_stderr,field_per_coupling_T"
        assert len(lines) == 1 + 3   # header + 3 lambda points
        assert f.read_text().endswith("\n")


def test_exclusion_time_override_halves_f_min(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["exclusion", exclusion_config(tmp_path, out_a, "unpolarized-5um", name="a.ini")]) in (0, 3)
    assert main(["exclusion", exclusion_config(tmp_path, out_b, "unpolarized-5um",
                                               t_s=4e4, name="b.ini")]) in (0, 3)
    fa = (out_a / "exclusion_v12_13_unpolarized-5um.csv").read_text().splitlines()[1:]
    fb = (out_b / "exclusion_v12_13_unpolarized-5um.csv").read_text().splitlines()[1:]
    for la, lb in zip(fa, fb):
        assert float(lb.split(",")[1]) == pytest.approx(float(la.split(",")[1]) / 2, rel=1e-8)


def test_polarized_preset_with_unpolarized_kind(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_config(tmp_path, f"""
[geometry]
preset = polarized-1um

[mc]
samples = 131072
seed = 2
target_rel_se = 0.3

[run]
kind = v4_5
lambda_um = 1
out_dir = {out}
""")
    assert main(["field", cfg]) == 2
    assert "does not require polarized mass" in capsys.readouterr().err
    assert main(["field", cfg, "--force"]) == 0


def test_unpolarized_preset_with_polarized_kind(tmp_path, capsys):
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um

[run]
kind = v6_7
lambda_um = 5
out_dir = {tmp_path}
""")
    assert main(["field", cfg]) == 2
    assert "polarized" in capsys.readouterr().err


# ------------------------------------------------------------- systematics

def test_systematics_outputs(tmp_path):
    out = tmp_path / "out"
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-0.5um

[run]
kind = v4_5
lambda_um = 0.5
out_dir = {out}
""")
    assert main(["systematics", cfg]) == 0
    payload = json.loads((out / "budget.json").read_text())
    b = budget_from_dict(payload)
    names = [e.name for e in b.entries]
    assert "surface_charge" in names and "shear_stress" in names
    assert max(b.entries, key=lambda e: e.spurious_field).name == "surface_charge"
    assert (out / "budget.txt").read_text().startswith("Systematics budget")


# ------------------------------------------------------------- responsivity

def test_responsivity_csv(tmp_path):
    out = tmp_path / "out"
    cfg = write_config(tmp_path, f"""
[run]
kind = v12_13
lambda_um = 5
out_dir = {out}
""")
    assert main(["responsivity", cfg]) == 0
    lines = (out / "responsivity.csv").read_text().splitlines()
    assert lines[0] == "theta_deg,responsivity_hz_per_t,weighted"
    assert len(lines) == 1 + 181
    rows = [tuple(float(x) for x in l.split(",")) for l in lines[1:]]
    assert rows[0][0] == 0.0
    assert rows[0][2] == 0.0
    assert rows[0][1] == pytest.approx(K.gamma_nv, rel=1e-3)
    best = max(rows, key=lambda r: r[2])
    assert 75.0 <= best[0] <= 86.0


# ------------------------------------------------------------- optimize

def test_optimize_writes_sweeps(tmp_path):
    out = tmp_path / "out"
    cfg = write_config(tmp_path, f"""
[geometry]
preset = unpolarized-5um

[mc]
samples = 65536
seed = 6
target_rel_se = 0.4

[run]
kind = v12_13
lambda_um = 5
out_dir = {out}
""")
    assert main(["optimize", cfg]) == 0
    for param in ("d_nv", "d_tm", "R_tm", "d_gap"):
        f = out / f"sweep_{param}.csv"
        lines = f.read_text().splitlines()
        assert lines[0] == "param_value_m,fom_normalized,stderr"
        assert len(lines) >= 6
        vals = [float(l.split(",")[1]) for l in lines[1:]]
        assert max(vals) == pytest.approx(1.0, rel=1e-8)


def test_missing_config_file(tmp_path, capsys):
    assert main(["field", str(tmp_path / "none.ini")]) == 2
