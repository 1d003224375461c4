import json
import random
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from soliton_forge import cli
from soliton_forge.errors import SchemaError, SpecError

SPECS = Path(cli.__file__).parent / "specs"
SCHEMAS = Path(cli.__file__).parent / "schemas"
DOCS = Path(__file__).resolve().parents[1] / "docs" / "schemas"
SHIPPED = sorted(p.name for p in SPECS.glob("*.json"))
REPORT_SCHEMA = json.loads((SCHEMAS / "report.schema.json").read_text())


def spec_dict(name="hyperbolic-half-space.json"):
    return json.loads((SPECS / name).read_text())


def write(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run_json(capsys, *argv):
    code = cli.main([*argv, "--json", "-"])
    out = capsys.readouterr().out
    return code, out


# -- spec loading -------------------------------------------------------------------


def test_shipped_specs_listed():
    assert set(cli.shipped_specs()) >= {"hyperbolic-half-space.json", "horospherical.json", "euclidean-constant.json"}


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_specs_load(name):
    spec = cli.load_spec(SPECS / name)
    assert spec.dimension == 3 and tuple(spec.coordinates) == ("x", "y", "z")
    assert set(spec.box) == {"x", "y", "z"}


def test_bare_name_resolves_to_shipped_spec():
    assert cli.resolve_spec_path("horospherical.json") == SPECS / "horospherical.json"


@pytest.mark.parametrize(
    "mutate,pointer",
    [
        (lambda d: d.update(extra=1), ""),
        (lambda d: d["metric"][0].__setitem__(0, "1/z^"), "/metric/0/0"),
        (lambda d: d["metric"][1].__setitem__(1, "w"), "/metric/1/1"),
        (lambda d: d["metric"][1].__setitem__(0, "5"), "/metric/1/0"),
        (lambda d: d["vector_field"]["components"].pop(), "/vector_field/components"),
        (lambda d: d["sampling"]["box"].__setitem__("z", [3, 1]), "/sampling/box/z"),
        (lambda d: d["soliton"].__setitem__("lambda", "-2/z - "), "/soliton/lambda"),
    ],
)
def test_load_spec_error_pointers(tmp_path, mutate, pointer):
    doc = spec_dict()
    mutate(doc)
    with pytest.raises(SpecError) as info:
        cli.load_spec(write(tmp_path, doc))
    assert info.value.pointer == pointer


def test_riemann_kind_needs_dimension_three(tmp_path):
    doc = {
        "name": "plane",
        "dimension": 2,
        "coordinates": ["x", "y"],
        "metric": [["1", "0"], [None, "1"]],
        "vector_field": {"components": ["1", "0"]},
        "soliton": {"kind": "riemann", "lambda": "0"},
        "sampling": {"box": {"x": [0, 1], "y": [0, 1]}, "count": 4, "seed": 1},
    }
    with pytest.raises(SchemaError) as info:
        cli.load_spec(write(tmp_path, doc))
    assert info.value.pointer == "/soliton/kind"
    doc["soliton"]["kind"] = "ricci"
    assert cli.load_spec(write(tmp_path, doc)).dimension == 2


def test_not_json(tmp_path):
    with pytest.raises(SchemaError):
        cli.load_spec(write(tmp_path, "{not json"))


# -- exit codes -------------------------------------------------------------------


@pytest.mark.parametrize("name", SHIPPED)
@pytest.mark.parametrize("command", ["check", "identities", "classify"])
def test_shipped_specs_pass(capsys, name, command):
    code, out = run_json(capsys, command, str(SPECS / name))
    doc = json.loads(out)
    assert code == 0, [c for c in doc["checks"] if c["pass"] is False]
    assert doc["status"] == "pass"
    jsonschema.validate(doc, REPORT_SCHEMA)


def test_wrong_lambda_exits_one(tmp_path, capsys):
    doc = spec_dict()
    doc["soliton"]["lambda"] = "-2/z - 1.1"
    code, out = run_json(capsys, "check", write(tmp_path, doc))
    assert code == 1
    report = json.loads(out)
    assert report["status"] == "fail"
    failed = {c["name"] for c in report["checks"] if c["pass"] is False}
    assert "riemann_soliton" in failed


def test_syntax_error_exits_two(tmp_path, capsys):
    doc = spec_dict()
    doc["metric"][0][0] = "1/z^"
    code, out = run_json(capsys, "check", write(tmp_path, doc))
    assert code == 2
    report = json.loads(out)
    assert report["status"] == "error"
    jsonschema.validate(report, REPORT_SCHEMA)


def test_missing_file_exits_two(capsys):
    assert cli.main(["check", "/nonexistent/spec.json"]) == 2
    assert "soliton-forge: error:" in capsys.readouterr().err


def test_singular_metric_exits_three(tmp_path, capsys):
    doc = spec_dict("euclidean-constant.json")
    doc["metric"][2][2] = "0"
    code, _ = run_json(capsys, "check", write(tmp_path, doc))
    assert code == 3


def test_curvature_without_point_exits_two(capsys):
    assert cli.main(["curvature", "horospherical.json"]) == 2


def test_bad_tolerance_rejected():
    with pytest.raises(SystemExit) as info:
        cli.main(["check", "horospherical.json", "--tol", "-1"])
    assert info.value.code == 2


# -- report content ------------------------------------------------------------------


def test_tolerance_echoed(capsys):
    _, out = run_json(capsys, "check", "horospherical.json", "--tol", "1e-3")
    doc = json.loads(out)
    assert all(c["tolerance"] == 1e-3 for c in doc["checks"])


def test_recover_lambda_text(capsys):
    assert cli.main(["recover-lambda", "horospherical.json", "--at", "0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "lambda_recovery" in out and "1.0" in out


def test_recover_lambda_samples(capsys):
    _, out = run_json(capsys, "recover-lambda", "hyperbolic-half-space.json")
    rec = next(c for c in json.loads(out)["checks"] if c["name"] == "lambda_recovery")
    for s in rec["values"]["samples"]:
        z = s["point"][2]
        assert s["lambda"] == pytest.approx(-2 / z - 1, rel=1e-8)


def test_classify_euclidean(capsys):
    _, out = run_json(capsys, "classify", "euclidean-constant.json")
    cls = json.loads(out)["classification"]
    for prop in ("gradient", "solenoidal", "torse_forming", "concircular", "constant_length", "parallel"):
        assert cls[prop]["holds"], prop
    assert cls["a_values"] == [0] * 16 and cls["excluded"] == []


def test_curvature_command(capsys):
    code, out = run_json(capsys, "curvature", "horospherical.json", "--at", "0,0,0", "--tensor", "conharmonic")
    assert code == 0
    vals = json.loads(out)["checks"][0]["values"]
    assert vals["variance"] == "uddd"
    assert vals["components"][0][0][1][1] == pytest.approx(3)


def test_sample_set_is_first(capsys):
    _, out = run_json(capsys, "check", "horospherical.json")
    first = json.loads(out)["checks"][0]
    assert first["name"] == "sample_set" and first["values"]["count"] == 16


def test_kind_override(capsys):
    code, out = run_json(capsys, "check", "hyperbolic-half-space-ricci.json", "--kind", "riemann")
    # the ricci lambda does not solve the riemann equation
    assert code == 1


# -- determinism ------------------------------------------------------------------------


def test_json_is_byte_identical(tmp_path, monkeypatch, capsys):
    blobs = []
    for i, threads in enumerate(["1", "1", "4"]):
        monkeypatch.setenv(cli.THREADS_ENV, threads)
        out = tmp_path / f"r{i}.json"
        cli.main(["identities", "horospherical.json", "--json", str(out)])
        blobs.append(out.read_bytes())
    capsys.readouterr()
    assert blobs[0] == blobs[1] == blobs[2]


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv(cli.THREADS_ENV, raising=False)
    assert cli.thread_count() == 1
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.thread_count() == 3


def test_dumps_formats():
    assert cli.dumps({"a": 0.1, "b": float("nan"), "c": [1, 2]}) == cli.dumps({"a": 0.1, "b": None, "c": [1, 2]})
    assert json.loads(cli.dumps({"a": 0.1}))["a"] == 0.1


def test_schemas_shipped_in_docs():
    for name in ("spec.schema.json", "report.schema.json"):
        assert (DOCS / name).read_text() == (SCHEMAS / name).read_text()


# -- robustness -------------------------------------------------------------------------


def test_metric_fuzz_never_crashes(tmp_path, capsys):
    rng = random.Random(2024)
    alphabet = "xyz0123456789+-*/^()., e"
    base = spec_dict()
    base["sampling"]["count"] = 2
    for trial in range(40):
        doc = json.loads(json.dumps(base))
        i, j = rng.choice([(0, 0), (0, 1), (1, 1), (2, 2)])
        text = doc["metric"][i][j]
        k = rng.randrange(len(text))
        doc["metric"][i][j] = text[:k] + rng.choice(alphabet) + text[k + 1 :]
        code = cli.main(["check", write(tmp_path, doc), "--json", "-"])
        capsys.readouterr()
        assert code in (0, 1, 2, 3)


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "soliton_forge.cli", "check", "euclidean-constant.json", "--json", "-"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"


def test_missing_lambda(tmp_path, capsys):
    doc = spec_dict("horospherical.json")
    del doc["soliton"]["lambda"]
    path = write(tmp_path, doc)
    assert cli.main(["check", path]) == 2
    code, out = run_json(capsys, "identities", path)
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["soliton_residuals"]["pass"] is None
    assert checks["bochner_laplacian"]["pass"] is True
    assert checks["first_bianchi"]["pass"] is True
    code, out = run_json(capsys, "recover-lambda", path)
    rec = next(c for c in json.loads(out)["checks"] if c["name"] == "lambda_recovery")
    assert code == 0 and rec["note"] == "no lambda supplied; recovered value only"
