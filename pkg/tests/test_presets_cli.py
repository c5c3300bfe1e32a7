import json
import os
import subprocess
import sys

import pytest

from hqmap import cli
from hqmap.errors import InputError
from hqmap.presets import expand_preset, presets


def _run(argv, capsys):
    status = cli.main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def test_preset_listing():
    names = [p["name"] for p in presets()]
    for n in ("circle", "ellipse", "affine", "quadratic", "nonqc", "star", "identity"):
        assert n in names


def test_preset_parameters_and_aliases():
    assert expand_preset("affine:a=0.5")["coeffs"] == [[1, 1, 0], [-1, 0.5, 0]]
    assert expand_preset("affine_a0.5") == expand_preset("affine:a=0.5")
    assert expand_preset("ellipse:a=3") == {"type": "ellipse", "a": 3.0, "b": 1.0}
    nonqc = expand_preset("nonqc")
    assert nonqc["type"] == "samples" and len(nonqc["values"]) == 1024


@pytest.mark.parametrize("name", ["square", "affine:a=1.5", "affine:z=1", "ellipse:a=x", "affine:a"])
def test_bad_presets(name):
    with pytest.raises(InputError):
        expand_preset(name)


def test_certify_circle(capsys):
    status, out, _ = _run(["certify", "--curve", "circle", "--K", "1"], capsys)
    assert status == 0
    rep = json.loads(out)
    assert rep["checks"] == {"finite": True}
    assert rep["result"]["alpha"] == pytest.approx(2 / (1 + 2 * rep["result"]["B_gamma"]) ** 2, rel=1e-12)


def test_analyze_affine(capsys):
    status, out, _ = _run(["analyze", "--map", "affine_a0.5", "--grid-radii", "8", "--grid-angles", "64"], capsys)
    assert status == 0
    rep = json.loads(out)["result"]
    assert rep["K"] == pytest.approx(3.0, abs=1e-9)
    assert rep["k_sup"] == pytest.approx(0.5, abs=1e-9)
    assert rep["criterion"]["predicted_qc"]


def test_analyze_K_assertion_failure_exits_one(capsys):
    status, out, _ = _run(["analyze", "--map", "affine", "--grid-radii", "4", "--grid-angles", "32",
                           "--K", "2"], capsys)
    assert status == 1
    assert json.loads(out)["failed"] == ["K_assert"]


def test_eremenko_constant_weight(capsys):
    status, out, _ = _run(["eremenko", "--A", "const:1", "--B", "1", "--q", "3", "--Q", "2"], capsys)
    assert status == 0
    rep = json.loads(out)["result"]
    assert rep["ratio"] == pytest.approx(1.5, abs=1e-9)
    assert rep["convexity_defect"] <= 0


def test_presets_command(capsys):
    status, out, _ = _run(["presets"], capsys)
    assert status == 0
    assert "circle" in [p["name"] for p in json.loads(out)["result"]["presets"]]
    status, out, _ = _run(["presets", "quadratic_b0.25"], capsys)
    assert json.loads(out)["result"]["spec"]["coeffs"] == [[1, 1, 0], [-2, 0.25, 0]]


def test_hilbert_and_jacobian_commands(capsys):
    status, out, _ = _run(["hilbert", "--map", "identity"], capsys)
    assert status == 0
    rep = json.loads(out)["result"]
    assert rep["conjugate_identity"] <= 1e-8
    status, out, _ = _run(["jacobian", "--map", "affine", "--tau", "0,1.5"], capsys)
    assert status == 0
    rep = json.loads(out)["result"]
    assert rep["count"] == 2
    assert rep["J_min"] == pytest.approx(0.75, abs=1e-3)


@pytest.mark.parametrize("argv", [
    ["analyze", "--map", "circle", "--N", "100"],
    ["analyze", "--map", "{not json"],
    ["analyze", "--map", "nosuchpreset"],
    ["certify", "--curve", "circle"],
    ["eremenko", "--A", "power:1,-1", "--B", "1", "--q", "1", "--Q", "1"],
    ["hilbert"],
])
def test_input_errors_exit_two(argv, capsys):
    status, out, err = _run(argv, capsys)
    assert status == 2
    assert out == ""
    assert err


def test_malformed_json_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{\"type\": ")
    status, _, err = _run(["jacobian", "--map", str(path)], capsys)
    assert status == 2 and "malformed" in err


def test_json_file_spec(tmp_path, capsys):
    path = tmp_path / "map.json"
    path.write_text(json.dumps(expand_preset("affine")))
    status, out, _ = _run(["jacobian", "--map", str(path), "--tau", "0"], capsys)
    assert status == 0
    assert json.loads(out)["result"]["J_min"] == pytest.approx(0.75, abs=1e-3)


def test_nonqc_certificate_unavailable(capsys):
    status, out, _ = _run(["certify", "--map", "nonqc"], capsys)
    assert status == 1
    assert json.loads(out)["failed"] == ["CertificateUnavailableError"]


def test_csv_output_and_out_file(tmp_path, capsys):
    target = tmp_path / "j.csv"
    status, out, _ = _run(["jacobian", "--map", "identity", "--format", "csv", "--out", str(target),
                           "--tau", "0,1,2"], capsys)
    assert status == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "tau,J,remainder,bound"
    assert len(lines) == 4


def test_module_entry_point():
    env = dict(os.environ)
    res = subprocess.run([sys.executable, "-m", "hqmap", "presets", "circle"], capture_output=True,
                         text=True, env=env, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["result"]["spec"] == {"type": "circle", "r": 1.0}
