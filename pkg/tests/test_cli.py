import cmath
import io
import json
import subprocess
import sys

import pytest

from smtc_anomaly import catalog
from smtc_anomaly.cli import build_parser, load_input, run_cli, InputError


def run(*argv):
    out = io.StringIO()
    code = run_cli(list(argv), out)
    return code, out.getvalue()


def test_verify_catalog_entry():
    code, text = run("verify", "catalog:so3_3")
    assert code == 0
    assert text.strip().endswith("all checks passed")


def test_epin_on_u1_5():
    code, text = run("indicators", "catalog:u1_5", "--symmetry", "epin")
    assert code == 0
    assert "value = (1, 0)" in text and "nu = 0/4" in text


@pytest.mark.parametrize("name,nu", [("semion_fermion", 2), ("so3_3", 3)])
def test_indicators_json(name, nu):
    code, text = run("indicators", f"catalog:{name}", "--action", "z4", "--symmetry", "epin", "--json")
    assert code == 0
    doc = json.loads(text)
    assert doc["results"][0]["nu"] == nu
    assert doc["flags"] == []


def test_pin_plus_via_cli():
    code, text = run("indicators", "catalog:so3_3", "--action", "z2", "--symmetry", "pin+", "--json")
    assert code == 0 and json.loads(text)["results"][0]["nu"] == 3


def test_other_convention():
    _, text = run("indicators", "catalog:so3_3", "--symmetry", "epin", "--convention=-i", "--json")
    assert json.loads(text)["results"][0]["nu"] == 1


def test_class_c_from_charges():
    code, text = run("indicators", "catalog:semion_fermion", "--symmetry", "classC", "--charges", "0,1/2,1/2,0", "--json")
    assert code == 0
    assert json.loads(text)["sigma_H"] == "0"


def test_ci_report():
    code, text = run("indicators", "catalog:toric_fermion", "--action", "ci_eTmT", "--symmetry", "CI")
    assert code == 0
    assert "RP4: value = (-1, 0)  nu = 2/4" in text


@pytest.fixture
def broken(tmp_path):
    """SO(3)_3 with one 1x1 F block rotated by a phase: still unitary, no longer coherent."""
    path = tmp_path / "so3.json"
    assert run("catalog", "export", "so3_3", str(path))[0] == 0
    doc = json.loads(path.read_text())
    for entry in doc["F"]:
        if (entry["a"], entry["b"], entry["c"], entry["d"]) == ("psi",) * 4:
            z = complex(*entry["value"]) * cmath.exp(0.3j)
            entry["value"] = [z.real, z.imag]
    out = tmp_path / "broken.json"
    out.write_text(json.dumps(doc))
    return out


def test_verify_broken_file(broken):
    code, text = run("verify", str(broken))
    assert code == 1
    assert "pentagon:" in text and "violation" in text
    assert "  pentagon (" in text


def test_export_roundtrip(tmp_path):
    path = tmp_path / "sf.json"
    assert run("catalog", "export", "semion_fermion/z2", str(path))[0] == 0
    action = tmp_path / "sf.action.json"
    assert action.exists()
    c, act, base = load_input(str(path), str(action))
    assert base is None and act.symmetry.order == 2
    code, text = run("indicators", str(path), "--action", str(action), "--symmetry", "pin+", "--json")
    assert code == 0 and json.loads(text)["results"][0]["nu"] == 2


def test_catalog_list():
    code, text = run("catalog", "list")
    assert code == 0
    assert [line.split()[0] for line in text.splitlines()] == catalog.names()


def test_zest_target():
    code, text = run("zest", "catalog:u1_20", "--target-c", "0")
    assert code == 0
    assert "c = 0" in text and "Z2 x Z10" in text


@pytest.mark.parametrize(
    "smtc,ext,layer1,layer3",
    [
        ("u1_5", "zested_b", False, False),
        ("semion_fermion", "u1_2xu1_m4", False, True),
        ("so3_3", "su2_6", True, None),
    ],
)
def test_cascade(smtc, ext, layer1, layer3):
    code, text = run("cascade", f"catalog:{smtc}", "--extension", f"catalog:{ext}", "--json")
    assert code == 0
    doc = json.loads(text)
    assert doc["layer1"]["obstructed"] is layer1
    if layer3 is not None:
        assert doc["layer3"]["obstructed"] is layer3
        assert doc["layer3"]["linear_obstructed"] is layer3


def test_gauge_orbit():
    code, text = run("gauge-orbit", "catalog:so3_3", "--samples", "4", "--seed", "11", "--json")
    assert code == 0
    doc = json.loads(text)
    assert doc["ok"] and doc["max_deviation"] < 1e-8


@pytest.mark.parametrize(
    "argv",
    [
        ["gauge-orbit", "catalog:semion_fermion", "--samples", "3", "--seed", "5", "--json"],
        ["invariants", "catalog:su2_6", "--json"],
        ["indicators", "catalog:so3_3", "--symmetry", "epin", "--json"],
    ],
)
def test_json_is_byte_identical(argv):
    first, second = run(*argv), run(*argv)
    assert first == second
    doc = json.loads(first[1])
    assert json.dumps(doc, sort_keys=True, indent=1) + "\n" == first[1]


def test_invariants_text():
    code, text = run("invariants", "catalog:su2_6")
    assert code == 0 and "9/4" in text


# ---- error paths -------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "/nonexistent/file.json"],
        ["verify", "catalog:nope"],
        ["indicators", "catalog:so3_3", "--action", "z2", "--symmetry", "epin"],
        ["indicators", "catalog:su2_6", "--symmetry", "epin"],
        ["indicators", "catalog:u1_5", "--symmetry", "classA", "--charges", "1,2"],
        ["indicators", "catalog:u1_5", "--symmetry", "bogus"],
        [],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    code, out = run(*argv)
    assert code == 2
    assert out == ""
    assert capsys.readouterr().err


def test_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", str(bad))[0] == 2


def test_invariants_of_super_modular_input():
    code, text = run("invariants", "catalog:semion_fermion")
    assert code == 0
    assert "transparent: 1, psi" in text and "undefined" in text


def test_load_input_rejects_foreign_action():
    with pytest.raises(InputError):
        load_input("catalog:u1_5", "catalog:so3_3/z4")


def test_help_exits_cleanly():
    assert run("--help")[0] == 0
    assert "indicators" in build_parser().format_help()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "smtc_anomaly", "indicators", "catalog:u1_5", "--symmetry", "epin"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "value = (1, 0)" in proc.stdout


def test_module_entry_point_error_stream():
    proc = subprocess.run(
        [sys.executable, "-m", "smtc_anomaly", "verify", "missing.json"], capture_output=True, text=True, timeout=120
    )
    assert proc.returncode == 2
    assert proc.stdout == "" and "error" in proc.stderr
