"""Command-line front end: load a spec file, run a suite, emit a report.

Exit codes: 0 all checks pass, 1 some check failed, 2 malformed input
(schema, expression, dimension, missing lambda, I/O), 3 numerical failure
(singular or indefinite metric, domain error, no usable sample points).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from . import geometry as geo
from .errors import (
    ExprError,
    HypothesisUnmet,
    MissingLambda,
    NumericalError,
    OrderError,
    SchemaError,
    SpecError,
    ZeroVectorField,
)
from .expr import FUNCTION_NAMES, parse
from .geometry import ChartManifold, VectorFieldSpec
from .sampling import sample_points
from .soliton import identities as ident
from .soliton import torse
from .soliton.classify import classify_vector_field
from .soliton.context import SolitonInput, context
from .soliton.report import DEFAULT_TOL, CheckReport, CheckResult, holds
from .soliton.residuals import recover_lambda, soliton_residual_suite

COMMANDS = ("check", "recover-lambda", "classify", "identities", "curvature")
TENSORS = ("riemann", "ricci", "scalar", "weyl", "conharmonic")
THREADS_ENV = "SOLITON_FORGE_THREADS"


# -- spec files ---------------------------------------------------------------


@dataclass(frozen=True)
class SpecFile:
    name: str
    dimension: int
    coordinates: tuple
    metric: tuple
    vector_field: dict
    soliton: dict
    sampling: dict
    input: SolitonInput

    @property
    def box(self) -> dict:
        return self.sampling["box"]


def _schema(name: str) -> dict:
    return json.loads(resources.files("soliton_forge").joinpath("schemas", name).read_text("utf-8"))


def shipped_specs() -> list[str]:
    return sorted(p.name for p in resources.files("soliton_forge").joinpath("specs").iterdir() if p.name.endswith(".json"))


def resolve_spec_path(path) -> Path:
    """The path itself, or a shipped spec of that file name."""
    p = Path(path)
    if not p.exists() and p.parent == Path(".") and p.name in shipped_specs():
        return Path(str(resources.files("soliton_forge").joinpath("specs", p.name)))
    return p


def _pointer(parts) -> str:
    return "".join("/" + str(x).replace("~", "~0").replace("/", "~1") for x in parts)


def _parse_at(text, coordinates, pointer):
    try:
        return parse(text, coordinates)
    except ExprError as exc:
        exc.pointer = pointer
        raise


def load_spec(path) -> SpecFile:
    """Read, validate and parse a spec file."""
    raw = resolve_spec_path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError:
        raise SchemaError("", "spec file is not valid UTF-8") from None
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON ({exc.msg} at line {exc.lineno}, column {exc.colno})") from None
    validator = jsonschema.Draft202012Validator(_schema("spec.schema.json"))
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        raise SchemaError(_pointer(error.absolute_path), error.message)

    n = doc["dimension"]
    coords = tuple(doc["coordinates"])
    if len(coords) != n:
        raise SchemaError("/coordinates", f"expected {n} coordinates, got {len(coords)}")
    clash = sorted(set(coords) & FUNCTION_NAMES)
    if clash:
        raise SchemaError("/coordinates", f"coordinate names clash with function names: {clash}")
    metric = doc["metric"]
    if len(metric) != n:
        raise SchemaError("/metric", f"expected {n} rows, got {len(metric)}")
    for i, row in enumerate(metric):
        if len(row) != n:
            raise SchemaError(f"/metric/{i}", f"expected {n} entries, got {len(row)}")
        for j, entry in enumerate(row):
            if j >= i and entry is None:
                raise SchemaError(f"/metric/{i}/{j}", "upper-triangle entries are required")
            if j < i and entry is not None and entry != metric[j][i]:
                raise SchemaError(f"/metric/{i}/{j}", f"must be null or equal to /metric/{j}/{i}")
    vf = doc["vector_field"]
    if len(vf["components"]) != n:
        raise SchemaError("/vector_field/components", f"expected {n} components")
    sol = doc["soliton"]
    if sol["kind"] == "riemann" and n < 3:
        raise SchemaError("/soliton/kind", "the riemann soliton suite needs dimension >= 3")
    box = doc["sampling"]["box"]
    if set(box) != set(coords):
        raise SchemaError("/sampling/box", "needs exactly one interval per coordinate")
    for c in coords:
        lo, hi = box[c]
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SchemaError(f"/sampling/box/{c}", "interval must satisfy lo < hi")

    rows = [
        [_parse_at(metric[min(i, j)][max(i, j)], coords, f"/metric/{min(i, j)}/{max(i, j)}") for j in range(n)]
        for i in range(n)
    ]
    manifold = ChartManifold(coords, tuple(tuple(r) for r in rows), tuple(tuple(box[c]) for c in coords), doc["name"])
    comps = tuple(_parse_at(t, coords, f"/vector_field/components/{k}") for k, t in enumerate(vf["components"]))
    pot = _parse_at(vf["potential"], coords, "/vector_field/potential") if "potential" in vf else None
    lam = _parse_at(sol["lambda"], coords, "/soliton/lambda") if "lambda" in sol else None
    inp = SolitonInput(manifold, VectorFieldSpec(comps, pot), sol["kind"], lam)
    upper = tuple(tuple(metric[min(i, j)][max(i, j)] for j in range(n)) for i in range(n))
    return SpecFile(doc["name"], n, coords, upper, dict(vf), dict(sol), dict(doc["sampling"]), inp)


# -- running ------------------------------------------------------------------


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items):
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _skip(name, point, tol, reason) -> CheckResult:
    return CheckResult(name, None, tol, None, tuple(point), reason)


def _identities_at(inp: SolitonInput, p, tol: float, order: int) -> CheckReport:
    ctx = context(inp, p, order)
    rep = CheckReport()
    rep.extend(ident.curvature_identity_suite(inp.manifold, ctx.frame, tol))
    try:
        rep.extend(soliton_residual_suite(inp, ctx, tol))
    except MissingLambda as exc:
        rep.results.append(_skip("soliton_residuals", ctx.point, tol, str(exc)))
    if inp.kind == "riemann":
        suites = [
            ("gradient_identities", ident.gradient_identity_suite),
            ("ric_norm_identities", ident.ric_norm_identity),
            ("solenoidal_identities", ident.solenoidal_suite),
            ("constant_length_ingredient", ident.constant_length_ingredient),
            ("torse_forming_suite", torse.torse_forming_suite),
            ("jacobi_condition", torse.jacobi_condition),
            ("nabla_ricci_conditions", torse.nabla_ric_conditions),
        ]
    else:
        suites = [
            ("gradient_identities", ident.gradient_identity_suite),
            ("conharmonic_criterion_suite", torse.conharmonic_criterion),
        ]
    for name, fn in suites:
        try:
            rep.extend(fn(inp, ctx, tol))
        except (HypothesisUnmet, MissingLambda, ZeroVectorField, OrderError) as exc:
            rep.results.append(_skip(name, ctx.point, tol, str(exc)))
    return rep


def _recover_at(inp: SolitonInput, p, tol: float, order: int) -> CheckReport:
    ctx = context(inp, p, order)
    rec = recover_lambda(inp, ctx, tol)
    values = {"lambda": rec.value, **rec.ingredients, "gradient_residual": rec.gradient_residual}
    if inp.lam is not None:
        supplied = float(ctx.lam_j)
        values["supplied_lambda"] = supplied
        residual = abs(rec.value - supplied)
        passed = holds(residual, max(abs(supplied), abs(rec.value)), tol)
        note = None
    else:
        residual, passed, note = None, True, "no lambda supplied; recovered value only"
    if not rec.hypothesis_met:
        passed, note = None, rec.note
    return CheckReport([CheckResult("lambda_recovery", residual, tol, passed, ctx.point, note, values)])


def _check_at(inp, p, tol, order) -> CheckReport:
    return soliton_residual_suite(inp, context(inp, p, order), tol)


POINT_RUNNERS = {
    "check": _check_at,
    "recover-lambda": _recover_at,
    "identities": _identities_at,
}


def _points(spec: SpecFile, inp: SolitonInput, at, order):
    if at is not None:
        if len(at) != spec.dimension:
            raise SpecError(f"--at needs {spec.dimension} coordinates, got {len(at)}")
        context(inp, at, order)  # surface numerical errors at the requested point
        meta = {"count": 1, "requested": True, "exclusions": []}
        return [tuple(float(x) for x in at)], meta
    samples = sample_points(inp, spec.box, spec.sampling["count"], spec.sampling["seed"], order)
    meta = {
        "count": len(samples),
        "requested": False,
        "seed": spec.sampling["seed"],
        "exclusions": [{"slot": s, "reason": r} for s, r in samples.exclusions],
    }
    if not samples.points:
        raise NumericalError("no usable sample points in the box")
    return samples.points, meta


def _tensor_values(inp: SolitonInput, p, which: str, order: int):
    frame = geo.frame_at(inp.manifold, p, max(2, order))
    if which == "riemann":
        t, _ = geo.riemann(frame)
    elif which == "ricci":
        t = geo.ricci_scalar(frame)[0]
    elif which == "scalar":
        t = geo.ricci_scalar(frame)[2]
    elif which == "weyl":
        t = geo.weyl_conharmonic(frame)[0]
    else:
        t = geo.weyl_conharmonic(frame)[1]
    return t.variance, np.asarray(t.components)


def run(command: str, spec: SpecFile, tol: float = DEFAULT_TOL, at=None, order: int = 3,
        kind: Optional[str] = None, tensor: str = "riemann") -> dict:
    """Execute ``command``; returns the report document (without exit code)."""
    inp = spec.input
    if kind is not None and kind != inp.kind:
        if kind == "riemann" and spec.dimension < 3:
            raise SchemaError("/soliton/kind", "the riemann soliton suite needs dimension >= 3")
        inp = inp.with_kind(kind)
    classification = None

    if command == "curvature":
        if at is None:
            raise SpecError("curvature needs --at")
        if len(at) != spec.dimension:
            raise SpecError(f"--at needs {spec.dimension} coordinates, got {len(at)}")
        variance, comps = _tensor_values(inp, at, tensor, order)
        values = {"tensor": tensor, "variance": variance, "components": comps.tolist()}
        report = CheckReport([CheckResult(f"curvature_{tensor}", None, tol, True, tuple(at), None, values)])
        return _document(spec, report, classification)

    points, meta = _points(spec, inp, at, order)
    if command == "classify":
        cls = classify_vector_field(inp, points, tol, order)
        classification = cls.to_dict()
        report = CheckReport()
        for name, verdict in (
            ("potential_gradient", cls.potential_matches),
            ("concircular_gradient_form", cls.gradient_form_check),
            ("concircular_divergence", cls.divergence_check),
        ):
            if verdict is not None:
                report.results.append(CheckResult(name, verdict.residual, tol, verdict.holds, None, None, {}))
    else:
        runner = POINT_RUNNERS[command]
        per_point = _map(lambda p: runner(inp, p, tol, order), points)
        report = CheckReport.reduce(per_point)
        if command == "recover-lambda":
            samples = []
            for p, rep in zip(points, per_point):
                r = rep["lambda_recovery"]
                samples.append({"point": list(p), **r.values})
            report["lambda_recovery"].values["samples"] = samples
        if command == "identities" and inp.kind == "ricci" and "concircular_scalar" in report:
            scal = [float(context(inp, p, order).scal_j) for p in points]
            spread = torse.scalar_curvature_spread(scal)
            eq3_everywhere = all(
                rep["conharmonic_criterion"].values.get("rhs_holds", False)
                for rep in per_point
                if "conharmonic_criterion" in rep
            )
            ok = (not eq3_everywhere) or holds(spread, max(abs(x) for x in scal), tol)
            report.results.append(
                CheckResult("scalar_curvature_spread", spread, tol, ok, None, None, {"min": min(scal), "max": max(scal)})
            )
    report.results.insert(0, CheckResult("sample_set", None, tol, True, None, None, meta))
    return _document(spec, report, classification)


def _document(spec: Optional[SpecFile], report: CheckReport, classification) -> dict:
    checks = []
    for r in report:
        checks.append(
            {
                "name": r.name,
                "pass": r.passed,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "worst_point": None if r.point is None else list(r.point),
                "note": r.note,
                "values": r.values,
            }
        )
    status = "fail" if any(c["pass"] is False for c in checks) else "pass"
    return {
        "spec": None if spec is None else spec.name,
        "version": __version__,
        "checks": checks,
        "classification": classification,
        "status": status,
    }


def error_document(spec: Optional[SpecFile], message: str, tol: float) -> dict:
    doc = _document(spec, CheckReport([CheckResult("error", None, tol, False, None, message)]), None)
    doc["status"] = "error"
    return doc


# -- output -------------------------------------------------------------------


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    return x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with floats written to 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or obj is True or obj is False or isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return "%.17g" % obj if math.isfinite(obj) else "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(_plain(v), (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return repr(round(x, 12)) if math.isfinite(x) else str(x)
    return str(x)


def _fmt_point(p) -> str:
    return "-" if p is None else "(" + ", ".join(_fmt(float(v)) for v in p) + ")"


def render_text(doc: dict, command: str) -> str:
    lines = [f"soliton-forge {doc['version']}  spec: {doc['spec']}  command: {command}"]
    checks = [c for c in doc["checks"] if c["name"] != "sample_set"]
    sample = next((c for c in doc["checks"] if c["name"] == "sample_set"), None)
    if sample is not None:
        meta = sample["values"]
        lines.append(f"sample points: {meta['count']}, exclusions: {len(meta['exclusions'])}")
    if command == "recover-lambda" and checks:
        rec = checks[0]["values"]
        keys = ["lambda", "norm_sq", "v_norm_sq", "laplacian_norm_sq", "nabla_v_sq", "div_v", "v_div_v"]
        lines.append("")
        header = ["point"] + keys
        rows = [[_fmt_point(s["point"])] + [_fmt(s[k]) for k in keys] for s in rec.get("samples", [])]
        lines.extend(_table(header, rows))
    if command == "curvature" and checks:
        vals = checks[0]["values"]
        comps = np.asarray(vals["components"], dtype=float)
        lines.append(f"{vals['tensor']} ({vals['variance'] or 'scalar'}) at {_fmt_point(checks[0]['worst_point'])}")
        if comps.ndim == 0:
            lines.append(f"  value = {_fmt(float(comps))}")
        else:
            nz = [(idx, float(comps[idx])) for idx in np.ndindex(*comps.shape) if abs(comps[idx]) > 1e-14]
            if not nz:
                lines.append("  all components vanish")
            for idx, v in nz:
                lines.append(f"  [{','.join(map(str, idx))}] = {_fmt(v)}")
    if doc["classification"] is not None:
        cls = doc["classification"]
        lines.append("")
        rows = []
        for key in ("gradient", "solenoidal", "torse_forming", "concircular", "constant_length", "parallel"):
            rows.append([key, "yes" if cls[key]["holds"] else "no", _fmt(cls[key]["residual"])])
        lines.extend(_table(["property", "holds", "residual"], rows))
        a = [x for x in cls["a_values"] if x is not None]
        if a:
            lines.append(f"a ranges over [{_fmt(min(a))}, {_fmt(max(a))}]")
    if checks and command != "curvature":
        lines.append("")
        rows = []
        for c in checks:
            status = {True: "PASS", False: "FAIL", None: "SKIP"}[c["pass"]]
            rows.append([c["name"], status, _fmt(c["residual"]), _fmt(c["tolerance"]), _fmt_point(c["worst_point"])])
        lines.extend(_table(["check", "status", "residual", "tolerance", "worst point"], rows))
        notes = [(c["name"], c["note"]) for c in checks if c["note"]]
        if notes:
            lines.append("")
            lines.extend(f"  {name}: {note}" for name, note in notes)
    lines.append("")
    lines.append(f"status: {doc['status']}")
    return "\n".join(lines) + "\n"


def _table(header, rows) -> list[str]:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    out = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        out.append("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip())
    return out


def emit_report(doc: dict, fmt: str = "text", path=None, command: str = "check"):
    """Write ``doc`` as text or JSON to ``path`` (``None`` or ``"-"`` is stdout)."""
    text = dumps(doc) + "\n" if fmt == "json" else render_text(doc, command)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- entry point --------------------------------------------------------------


def _floats(text: str):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soliton-forge", description="Verify soliton identities on a coordinate chart.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("spec", help="spec file (or the file name of a shipped spec)")
    ap.add_argument("--kind", choices=("riemann", "ricci"), help="override the soliton kind of the spec")
    ap.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="base tolerance (default 1e-8)")
    ap.add_argument("--at", type=_floats, help="evaluate at this point instead of sampling, e.g. 0,0,1")
    ap.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH ('-' for stdout only)")
    ap.add_argument("--order", type=int, choices=(2, 3), default=3, help="jet order of the metric (default 3)")
    ap.add_argument("--tensor", choices=TENSORS, default="riemann", help="tensor for the curvature command")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = None
    try:
        spec = load_spec(args.spec)
        doc = run(args.command, spec, args.tol, args.at, args.order, args.kind, args.tensor)
        code = 1 if doc["status"] == "fail" else 0
    except (SpecError, OrderError, OSError) as exc:
        pointer = getattr(exc, "pointer", None)
        msg = f"{pointer}: {exc}" if pointer and not isinstance(exc, SchemaError) else str(exc)
        doc, code = error_document(spec, msg, args.tol), 2
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        doc, code = error_document(spec, str(exc) or type(exc).__name__, args.tol), 3
    if code >= 2:
        sys.stderr.write(f"soliton-forge: error: {doc['checks'][0]['note']}\n")
    if args.json != "-":
        if code < 2:
            emit_report(doc, "text", None, args.command)
        if args.json:
            try:
                emit_report(doc, "json", args.json)
            except OSError as exc:
                sys.stderr.write(f"soliton-forge: error: {exc}\n")
                return 2
    else:
        emit_report(doc, "json", "-")
    return code


if __name__ == "__main__":
    sys.exit(main())
