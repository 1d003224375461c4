"""Defining-equation residuals and closed-form recovery of lambda."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import NotGradient
from ..geometry import kulkarni_nomizu
from .context import SolitonInput, SolitonPoint, context, require_dimension
from .report import DEFAULT_TOL, Checker, CheckReport, holds, magnitude

INGREDIENTS = ("norm_sq", "v_norm_sq", "laplacian_norm_sq", "nabla_v_sq", "div_v", "v_div_v")


def _ctx(inp, p, order=2) -> SolitonPoint:
    return p if isinstance(p, SolitonPoint) else context(inp, p, order)


def gradient_residual(ctx: SolitonPoint) -> tuple[float, float]:
    """Orthonormal max of d(theta), with the scale of d(theta)'s entries."""
    dth = ctx.theta_j.grad().value  # [j, i] = d_i theta_j
    res = ctx.on(dth - dth.T, "dd")
    return magnitude(res), magnitude(ctx.on(dth, "dd"))


def is_gradient(ctx: SolitonPoint, tol: float = DEFAULT_TOL) -> bool:
    return holds(*gradient_residual(ctx), tol)


def require_gradient(ctx: SolitonPoint, tol: float):
    r, s = gradient_residual(ctx)
    if not holds(r, s, tol):
        raise NotGradient(f"V is not a gradient field at {ctx.point} (|d theta| = {r:.3g})")


# -- residuals of the soliton equations ---------------------------------------


def riemann_terms(ctx: SolitonPoint, lam_factor: float = 1.0):
    """Terms of 2R + (L_V g) (.) g - 2 lam' G with lam' = lam_factor * lambda."""
    lam = ctx.lam_j.value * lam_factor
    kn = ctx.gg_j.value
    lie_kn = kulkarni_nomizu(ctx.lie_g_j.value, ctx.frame.g)
    return [ctx.on(2.0 * ctx.Rd_j.value, "dddd"), ctx.on(lie_kn, "dddd"), ctx.on(-lam * kn, "dddd")]


def residual_riemann(inp: SolitonInput, p) -> float:
    """Orthonormal max of 2R + (L_V g)(.)g - 2 lambda G."""
    ctx = _ctx(inp, p)
    return magnitude(sum(riemann_terms(ctx)))


def ricci_terms(ctx: SolitonPoint, lam_factor: float = 1.0):
    lam = ctx.lam_j.value * lam_factor
    g = ctx.frame.g
    return [ctx.on(0.5 * ctx.lie_g_j.value, "dd"), ctx.on(ctx.ric_j.value, "dd"), ctx.on(-lam * g, "dd")]


def residual_ricci(inp: SolitonInput, p) -> float:
    """Orthonormal max of 1/2 L_V g + Ric - lambda g."""
    ctx = _ctx(inp, p)
    return magnitude(sum(ricci_terms(ctx)))


def contracted_terms(ctx: SolitonPoint):
    n = ctx.n
    lam = ctx.lam_j.value
    div = ctx.div_V_j.value
    mu = ((n - 1) * lam - div) / (n - 2)
    eq4 = [
        ctx.on(0.5 * ctx.lie_g_j.value, "dd"),
        ctx.on(ctx.ric_j.value / (n - 2), "dd"),
        ctx.on(-mu * ctx.frame.g, "dd"),
    ]
    eq9 = [ctx.scal_j.value, -(n - 1) * n * lam, 2.0 * (n - 1) * div]
    return eq4, eq9


def residual_contracted(inp: SolitonInput, p) -> tuple[float, float]:
    require_dimension(inp)
    ctx = _ctx(inp, p)
    eq4, eq9 = contracted_terms(ctx)
    return magnitude(sum(eq4)), abs(float(sum(eq9)))


# -- lambda recovery ------------------------------------------------------------


@dataclass
class LambdaRecovery:
    value: float
    ingredients: dict = field(default_factory=dict)
    gradient_residual: float = 0.0
    hypothesis_met: bool = True

    @property
    def note(self):
        return None if self.hypothesis_met else "hypothesis unmet: V is not a gradient field"


def ingredients(ctx: SolitonPoint) -> dict:
    """|V|^2, V(|V|^2), Lap(|V|^2), |nabla V|^2, div V, V(div V)."""
    nsq = ctx.norm_sq_j
    return {
        "norm_sq": float(nsq),
        "v_norm_sq": float(ctx.along_V(nsq)),
        "laplacian_norm_sq": float(ctx.laplacian(nsq)),
        "nabla_v_sq": float(ctx.nabla_V_norm_sq_j),
        "div_v": float(ctx.div_V_j),
        "v_div_v": float(ctx.along_V(ctx.div_V_j)),
    }


def _recover(inp, p, tol, kind):
    require_dimension(inp)
    ctx = _ctx(inp, p)
    ctx.require_nonzero()
    n = ctx.n
    ing = ingredients(ctx)
    bracket_v = (n - 2) if kind == "riemann" else 1
    bracket = (
        ing["laplacian_norm_sq"]
        - 2.0 * ing["nabla_v_sq"]
        + bracket_v * ing["v_norm_sq"]
        - 2.0 * ing["v_div_v"]
    )
    if kind == "riemann":
        lam = bracket / (2.0 * (n - 1) * ing["norm_sq"]) + ing["div_v"] / (n - 1)
    else:
        lam = bracket / (2.0 * ing["norm_sq"])
    r, s = gradient_residual(ctx)
    return LambdaRecovery(float(lam), ing, r, holds(r, s, tol))


def recover_lambda_riemann(inp: SolitonInput, p, tol: float = DEFAULT_TOL) -> LambdaRecovery:
    """lambda from V alone, for gradient almost Riemann solitons."""
    return _recover(inp, p, tol, "riemann")


def recover_lambda_ricci(inp: SolitonInput, p, tol: float = DEFAULT_TOL) -> LambdaRecovery:
    """lambda from V alone, for gradient almost Ricci solitons."""
    return _recover(inp, p, tol, "ricci")


def recover_lambda(inp: SolitonInput, p, tol: float = DEFAULT_TOL) -> LambdaRecovery:
    return _recover(inp, p, tol, inp.kind)


# -- suite used by the check command ----------------------------------------------


def soliton_residual_suite(inp: SolitonInput, p, tol: float = DEFAULT_TOL) -> CheckReport:
    """Defining equation plus its contractions at one point."""
    ctx = _ctx(inp, p)
    c = Checker(ctx.point, tol)
    lam = float(ctx.lam_j)
    if inp.kind == "riemann":
        c.identity("riemann_soliton", *riemann_terms(ctx), values={"lambda": lam})
        if inp.n >= 3:
            eq4, eq9 = contracted_terms(ctx)
            c.identity("contracted_ricci_form", *eq4)
            c.identity("scalar_curvature_trace", *eq9, values={"scal": float(ctx.scal_j)})
            c.identity("weyl_vanishes", *weyl_terms(ctx))
        else:
            c.skip("contracted_ricci_form", "needs n >= 3")
            c.skip("scalar_curvature_trace", "needs n >= 3")
    else:
        c.identity("ricci_soliton", *ricci_terms(ctx), values={"lambda": lam})
        c.identity(
            "ricci_soliton_trace",
            float(ctx.div_V_j),
            float(ctx.scal_j),
            -inp.n * lam,
            values={"scal": float(ctx.scal_j)},
        )
    return c.report


def weyl_terms(ctx: SolitonPoint):
    """Summands of the Weyl tensor, orthonormal components."""
    n = ctx.n
    g = ctx.frame.g
    scal = float(ctx.scal_j)
    return [
        ctx.on(ctx.Rd_j.value, "dddd"),
        ctx.on(ctx.gg_j.value * (scal / (2.0 * (n - 1) * (n - 2))), "dddd"),
        ctx.on(-kulkarni_nomizu(ctx.ric_j.value, g) / (n - 2), "dddd"),
    ]


__all__ = [
    "INGREDIENTS",
    "LambdaRecovery",
    "gradient_residual",
    "ingredients",
    "is_gradient",
    "recover_lambda",
    "recover_lambda_ricci",
    "recover_lambda_riemann",
    "residual_contracted",
    "residual_ricci",
    "residual_riemann",
    "ricci_terms",
    "riemann_terms",
    "soliton_residual_suite",
    "weyl_terms",
]
