"""Classification of the potential vector field over a sample set."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericalError, SolitonForgeError
from .context import SolitonInput, SolitonPoint, context
from .report import DEFAULT_TOL, holds, magnitude
from .residuals import gradient_residual


@dataclass
class Verdict:
    holds: bool
    residual: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "residual": self.residual}


@dataclass
class ClassificationReport:
    is_gradient: Verdict
    is_solenoidal: Verdict
    is_torse_forming: Verdict
    is_concircular: Verdict
    constant_length: Verdict
    is_parallel: Verdict
    potential_matches: Verdict | None = None
    a_values: list = field(default_factory=list)
    psi_norms: list = field(default_factory=list)
    gradient_form_check: Verdict | None = None
    divergence_check: Verdict | None = None
    points: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    def labels(self) -> list[str]:
        names = [
            ("gradient", self.is_gradient),
            ("solenoidal", self.is_solenoidal),
            ("torse-forming", self.is_torse_forming),
            ("concircular", self.is_concircular),
            ("constant-length", self.constant_length),
            ("parallel", self.is_parallel),
        ]
        return [name for name, v in names if v.holds]

    def to_dict(self) -> dict:
        out = {
            "gradient": self.is_gradient.to_dict(),
            "solenoidal": self.is_solenoidal.to_dict(),
            "torse_forming": self.is_torse_forming.to_dict(),
            "concircular": self.is_concircular.to_dict(),
            "constant_length": self.constant_length.to_dict(),
            "parallel": self.is_parallel.to_dict(),
            "potential_matches": None if self.potential_matches is None else self.potential_matches.to_dict(),
            "concircular_gradient_form": None if self.gradient_form_check is None else self.gradient_form_check.to_dict(),
            "concircular_divergence": None if self.divergence_check is None else self.divergence_check.to_dict(),
            "a_values": list(self.a_values),
            "psi_norms": list(self.psi_norms),
            "points": [list(p) for p in self.points],
            "excluded": [list(p) for p in self.excluded],
        }
        return out


class _Acc:
    """Running max of residuals with an all-points verdict."""

    def __init__(self):
        self.ok = True
        self.worst = 0.0
        self.seen = False

    def add(self, residual: float, scale: float, tol: float):
        self.seen = True
        self.ok = self.ok and holds(residual, scale, tol)
        self.worst = max(self.worst, float(residual))

    def fail(self):
        self.seen = True
        self.ok = False

    def verdict(self) -> Verdict:
        return Verdict(self.ok and self.seen, self.worst)


def classify_point(ctx: SolitonPoint, tol: float, acc: dict, rows: dict):
    nabla = ctx.on(ctx.nabla_V_j, "ud")
    n_scale = magnitude(nabla)
    acc["gradient"].add(*gradient_residual(ctx), tol)
    if ctx.potential_j is not None:
        gf = ctx.grad(ctx.potential_j).value
        V = ctx.V_j.value
        acc["potential"].add(magnitude(ctx.on(gf - V, "u")), max(magnitude(ctx.on(gf, "u")), magnitude(ctx.on(V, "u"))), tol)
    acc["solenoidal"].add(abs(float(ctx.div_V_j)), n_scale, tol)
    acc["parallel"].add(n_scale, 1.0, tol)
    d_nsq = ctx.on(ctx.norm_sq_j.grad().value, "d")
    acc["length"].add(magnitude(d_nsq), max(1.0, float(ctx.norm_sq_j) * n_scale), tol)

    if np.sqrt(max(ctx.norm_sq, 0.0)) <= 1e-12:
        acc["torse"].fail()
        acc["concircular"].fail()
        rows["a"].append(None)
        rows["psi"].append(None)
        return
    ok, r = ctx.torse_holds(tol)
    acc["torse"].add(r, n_scale, tol)
    a = float(ctx.a_j)
    psi_norm = magnitude(ctx.on(ctx.psi_j, "d"))
    rows["a"].append(a)
    rows["psi"].append(psi_norm)
    if not ok:
        acc["concircular"].fail()
        return
    acc["concircular"].add(psi_norm, n_scale, tol)
    if psi_norm <= tol * max(1.0, n_scale) and abs(a) > tol:
        V = ctx.V_j.value
        grad_nsq = ctx.grad(ctx.norm_sq_j).value
        terms = [ctx.on(V, "u"), ctx.on(-grad_nsq / (2.0 * a), "u")]
        acc["conc_grad"].add(magnitude(sum(terms)), max(magnitude(t) for t in terms), tol)
        div = float(ctx.div_V_j)
        acc["conc_div"].add(abs(div - ctx.n * a), max(abs(div), abs(ctx.n * a)), tol)


def classify_vector_field(inp: SolitonInput, points, tol: float = DEFAULT_TOL, order: int = 2) -> ClassificationReport:
    """Classify V over ``points``; points where evaluation fails are excluded."""
    keys = ("gradient", "potential", "solenoidal", "parallel", "length", "torse", "concircular", "conc_grad", "conc_div")
    acc = {k: _Acc() for k in keys}
    rows = {"a": [], "psi": []}
    used, excluded = [], []
    for p in points:
        try:
            ctx = p if isinstance(p, SolitonPoint) else context(inp, p, order)
            classify_point(ctx, tol, acc, rows)
        except SolitonForgeError:
            excluded.append(tuple(float(x) for x in (p.point if isinstance(p, SolitonPoint) else p)))
            continue
        used.append(ctx.point)
    if not used:
        raise NumericalError("no usable sample points to classify")
    return ClassificationReport(
        is_gradient=acc["gradient"].verdict(),
        is_solenoidal=acc["solenoidal"].verdict(),
        is_torse_forming=acc["torse"].verdict(),
        is_concircular=acc["concircular"].verdict(),
        constant_length=acc["length"].verdict(),
        is_parallel=acc["parallel"].verdict(),
        potential_matches=acc["potential"].verdict() if inp.V.potential is not None else None,
        a_values=rows["a"],
        psi_norms=rows["psi"],
        gradient_form_check=acc["conc_grad"].verdict() if acc["conc_grad"].seen else None,
        divergence_check=acc["conc_div"].verdict() if acc["conc_div"].seen else None,
        points=used,
        excluded=excluded,
    )
