"""The cv-oodg binary end to end: exit codes and schema-valid outputs."""

import json
import os
import pathlib
import shutil
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
FIXTURES = ROOT / "tests" / "fixtures"


@pytest.fixture(scope="module")
def binary():
    path = os.environ.get("CV_OODG_BIN") or shutil.which("cv-oodg")
    if not path:
        candidate = ROOT / "build" / "cv-oodg"
        path = str(candidate) if candidate.exists() else None
    if not path:
        pytest.skip("cv-oodg binary not found; set CV_OODG_BIN")
    return path


def run(binary, *args):
    return subprocess.run([binary, *args], capture_output=True, text=True, timeout=300)


def validate(doc, schema_name):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SCHEMAS / schema_name).read_text())
    jsonschema.Draft202012Validator(schema).validate(doc)


def test_bound_json(binary):
    r = run(binary, "bound", "--class", "universal", "--eps0", "1e-12", "--points", "4", "--nbar-max", "2",
            "--format", "json")
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    validate(doc, "curve.schema.json")
    assert all("s" in row for row in doc["rows"])


def test_extend_json(binary):
    r = run(binary, "extend", "--curve", "phase_rotation", "--eps0", "0.01", "--state", "spat:1")
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    validate(doc, "bound_report.schema.json")
    assert 0.0 <= doc["value"] < 2.0


def test_verify_json(binary):
    r = run(binary, "verify", "--suite", "delta-s")
    assert r.returncode == 0, r.stderr
    validate(json.loads(r.stdout), "verification_report.schema.json")


def test_sweep_json(binary):
    r = run(binary, "sweep", "--curve", "gaussian", "--eps0-list", "0.1,0.01", "--state", "fock:0..2;classical:1",
            "--format", "json")
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    validate(doc, "sweep.schema.json")
    assert len(doc["rows"]) == 8


def test_exit_codes(binary):
    neg = run(binary, "verify", "--suite", "dominance", "--curve-file", str(FIXTURES / "underscaled_pr.csv"))
    assert neg.returncode == 1
    assert "violation:" in neg.stderr and "nbar=" in neg.stderr
    assert run(binary, "sweep", "--eps0-list", "", "--state", "fock:1").returncode == 2
    assert run(binary, "bound", "--eps0", "-1").returncode == 2
    trivial = run(binary, "extend", "--state", "energy-only:1", "--fail-on-trivial")
    assert trivial.returncode == 3


def test_output_is_reproducible(binary, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        assert run(binary, "sweep", "--config", str(FIXTURES / "sweep.cfg"), "--threads", "2",
                   "--output", str(out)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
