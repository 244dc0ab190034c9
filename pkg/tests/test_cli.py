import csv
import io
import json
import shutil
import subprocess
import sys
from importlib import resources

from sl3whitehead.cli import CSV_FIELDS, main
from sl3whitehead.defvar import DefPoint

DATA = resources.files("sl3whitehead") / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_single_stage(capsys):
    code, out, err = run(capsys, "verify", "--stage", "tangent")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert "checks passed" in err


def test_verify_all_reports_failures(capsys):
    code, out, err = run(capsys, "verify")
    assert code == 1
    assert "FAIL [defpoint]" in err
    assert json.loads(out)["pass"] is False


def test_verify_corrupt_data(tmp_path, capsys):
    for f in DATA.iterdir():
        if f.name.endswith(".json"):
            shutil.copy(str(f), tmp_path / f.name)
    (tmp_path / "flags.json").write_text("{not json")
    code, out, err = run(capsys, "verify", "--data-dir", str(tmp_path))
    assert code == 2 and out == "" and "error" in err


def test_tangent(capsys):
    code, out, _ = run(capsys, "tangent", str(DATA / "gluing.json"), str(DATA / "rho0_point.json"), "--basis")
    assert code == 0
    data = json.loads(out)
    assert data["kernel_dimension"] == 4 and len(data["basis"]) == 4
    assert data["jacobian_shape"] == [48, 48]


def test_tangent_off_variety(tmp_path, capsys):
    p = DefPoint.load(DATA / "rho0_point.json")
    bad = p.replace((1, 2, 3), p[(1, 2, 3)] + 1)
    bad.save(tmp_path / "p.json")
    code, out, err = run(capsys, "tangent", str(DATA / "gluing.json"), str(tmp_path / "p.json"))
    assert code == 1
    assert json.loads(out)["on_variety"] is False
    assert "off the variety" in err


def test_tangent_bad_input(tmp_path, capsys):
    (tmp_path / "p.json").write_text("[]")
    code, _, _ = run(capsys, "tangent", str(DATA / "gluing.json"), str(tmp_path / "p.json"))
    assert code == 2
    code, _, _ = run(capsys, "tangent", str(tmp_path / "missing.json"), str(tmp_path / "p.json"))
    assert code == 2


def test_sample_single_point(capsys):
    code, out, _ = run(capsys, "sample", "--z", "5,3,5,3", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["sign"] for r in rows] == ["plus", "minus"]
    assert all(r["status"] == "ok" and r["Delta"] == "-375" for r in rows)


def test_sample_degenerate_row(capsys):
    code, out, _ = run(capsys, "sample", "--z", "0,0,0,-3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["status"].startswith("denominator vanishes")
    assert list(rows[0]) == list(CSV_FIELDS)


def test_sample_is_deterministic(capsys):
    args = ("sample", "--count", "100", "--seed", "7", "--sign", "plus", "--range=-5:5")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args, "--jobs", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(out1.splitlines()) == 101


def test_sample_float_mode(capsys):
    code, out, _ = run(capsys, "sample", "--grid", "1:2", "--mode", "float", "--format", "json")
    assert code == 0
    assert len(json.loads(out)) == 32


def test_sample_bad_arguments(capsys):
    assert run(capsys, "sample", "--z", "1,2,3")[0] == 2
    assert run(capsys, "sample", "--count", "3", "--range", "5:1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_import(tmp_path, capsys):
    system = json.loads((DATA / "gluing.json").read_text())
    order = system["column_order"]
    (tmp_path / "m.csv").write_text("\n".join(",".join(map(str, r["exponents"])) for r in system["rows"]) + "\n")
    (tmp_path / "h.json").write_text(json.dumps({
        "nu": 4, "column_order": order,
        "row_types": [r["type"] for r in system["rows"]],
        "labels": [r["label"] for r in system["rows"]],
    }))
    out_path = tmp_path / "inst.json"
    code, _, err = run(capsys, "import", str(tmp_path / "m.csv"), "--header", str(tmp_path / "h.json"),
                       "-o", str(out_path))
    assert code == 0 and "16 rows" in err
    assert json.loads(out_path.read_text()) == system
    (tmp_path / "h.json").write_text("{}")
    assert run(capsys, "import", str(tmp_path / "m.csv"), "--header", str(tmp_path / "h.json"))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sl3whitehead", "verify", "--stage", "rho0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
